#include "hrush/predim.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <sstream>

namespace hrush {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::TrivialR: return "trivial_r";
    case Preset::FieldR: return "field_r";
    case Preset::FieldF: return "field_f";
    case Preset::Exp: return "exp";
    case Preset::MultiF: return "multi_f";
    case Preset::Aut: return "aut";
    case Preset::Fusion: return "fusion";
  }
  return "?";
}

PredimensionSpec parse_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::vector<std::string> args;
  if (colon != std::string_view::npos) args = split(text.substr(colon + 1), ',');
  for (const auto& a : args)
    if (a.empty()) throw InputError("spec '" + std::string(text) + "': empty binding");
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw InputError("spec '" + std::string(text) + "': expected " + std::to_string(n) + " bindings");
  };
  PredimensionSpec s;
  if (name == "trivial_r") {
    want(0);
    s.preset = Preset::TrivialR;
  } else if (name == "field_r") {
    want(1);
    s.preset = Preset::FieldR;
    s.d1 = args[0];
  } else if (name == "field_f") {
    want(2);
    s.preset = Preset::FieldF;
    s.d1 = args[0];
    s.functions = {args[1]};
  } else if (name == "exp") {
    want(3);
    s.preset = Preset::Exp;
    s.d1 = args[0];
    s.d2 = args[1];
    s.functions = {args[2]};
  } else if (name == "multi_f") {
    want(2);
    s.preset = Preset::MultiF;
    s.d1 = args[0];
    s.functions = split(args[1], '+');
  } else if (name == "aut") {
    want(2);
    s.preset = Preset::Aut;
    s.d1 = args[0];
    s.functions = {args[1]};
  } else if (name == "fusion") {
    want(2);
    s.preset = Preset::Fusion;
    s.d1 = args[0];
    s.d2 = args[1];
  } else {
    throw InputError("unknown predimension preset '" + name + "'");
  }
  return s;
}

std::string format_spec(const PredimensionSpec& s) {
  std::string out = preset_name(s.preset);
  switch (s.preset) {
    case Preset::TrivialR: break;
    case Preset::FieldR: out += ":" + s.d1; break;
    case Preset::FieldF:
    case Preset::Aut: out += ":" + s.d1 + "," + s.functions.at(0); break;
    case Preset::Exp: out += ":" + s.d1 + "," + s.d2 + "," + s.functions.at(0); break;
    case Preset::MultiF: {
      out += ":" + s.d1 + ",";
      for (std::size_t i = 0; i < s.functions.size(); ++i) out += (i ? "+" : "") + s.functions[i];
      break;
    }
    case Preset::Fusion: out += ":" + s.d1 + "," + s.d2; break;
  }
  return out;
}

// ---------------------------------------------------------------------------

Predimension::Predimension(PredimensionSpec spec, const PreStructure& m) : spec_(std::move(spec)), m_(&m) {
  domain_ = m.all();
  for (const auto& t : m.triples) triple_masks_.push_back(triple_points(t));
  for (const auto& f : spec_.functions) fns_.push_back(&m.function(f));
  switch (spec_.preset) {
    case Preset::TrivialR:
      break;
    case Preset::FieldR:
      o1_ = &m.oracle(spec_.d1);
      break;
    case Preset::FieldF:
    case Preset::Aut:
    case Preset::MultiF:
      o1_ = &m.oracle(spec_.d1);
      if (spec_.preset != Preset::MultiF && fns_.size() != 1) throw InputError("spec binds exactly one function");
      break;
    case Preset::Exp:
      o1_ = &m.oracle(spec_.d1);
      o2_ = &m.oracle(spec_.d2);
      break;
    case Preset::Fusion:
      if (!m.sorts) throw InputError("fusion preset needs a two-sorted structure");
      o1_ = &m.oracle(spec_.d1);
      o2_ = &m.oracle(spec_.d2);
      break;
  }
  if (!fns_.empty() || spec_.preset == Preset::Fusion) domain_ = m.function_domain();
  if (!spec_.excluded.empty()) {
    if (spec_.preset != Preset::FieldF) throw InputError("excluded points apply to field_f only");
    excluded_ = m.set_of(spec_.excluded);
  }
  switch (spec_.preset) {
    case Preset::MultiF:
    case Preset::Aut:
      submodular_ = false;
      break;
    case Preset::Exp:
      submodular_ = o2_->kind() == OracleKind::Free;
      break;
    default:
      submodular_ = true;
  }
}

PointSet Predimension::image(const std::vector<int>& f, PointSet x) const {
  PointSet out;
  for (int i : x) out.insert(f[i]);
  return out;
}

int Predimension::delta(PointSet x) const {
  if (!x.subset_of(domain_)) throw InputError("delta: set leaves the preset's domain");
  switch (spec_.preset) {
    case Preset::TrivialR:
    case Preset::FieldR: {
      int r = 0;
      for (PointSet t : triple_masks_)
        if (t.subset_of(x)) ++r;
      const int d = spec_.preset == Preset::TrivialR ? x.size() : rank1(x);
      return d - r;
    }
    case Preset::FieldF: {
      const PointSet y = x - excluded_;
      return rank1(y | image(*fns_[0], y)) - y.size();
    }
    case Preset::Exp:
      return rank1(x | image(*fns_[0], x)) - o2_->rank(x);
    case Preset::Aut:
      return rank1(x | image(*fns_[0], x)) - rank1(x);
    case Preset::MultiF: {
      const int k = static_cast<int>(fns_.size());
      std::vector<PointSet> images(k);
      for (int i = 0; i < k; ++i) images[i] = image(*fns_[i], x);
      int best = INT_MAX;
      for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
        PointSet y = x;
        for (int i = 0; i < k; ++i)
          if (mask >> i & 1U) y |= images[i];
        best = std::min(best, rank1(y) - x.size() * std::popcount(mask));
      }
      return best;
    }
    case Preset::Fusion:
      return rank1(x) + o2_->rank(image(m_->sorts->bijection, x)) - x.size();
  }
  return 0;
}

int delta(const PredimensionSpec& spec, const PreStructure& m, PointSet x) { return Predimension(spec, m).delta(x); }

int delta_rel(const PredimensionSpec& spec, const PreStructure& m, PointSet b, PointSet a) {
  if (!a.subset_of(b)) throw InputError("delta_rel: base is not contained in the extension");
  Predimension p(spec, m);
  return p.delta(b) - p.delta(a);
}

// ---------------------------------------------------------------------------
// Minimization of delta over supersets.

namespace {

struct Minimum {
  int value = INT_MAX;
  PointSet witness;
};

double subset_count(int free_points) { return std::ldexp(1.0, free_points); }

void check_subset_budget(int free_points, const SearchBudget& budget, const char* what) {
  if (subset_count(free_points) > static_cast<double>(budget.max_subsets))
    throw BudgetExceeded(std::string(what) + ": " + std::to_string(subset_count(free_points)) +
                             " subsets exceed budget " + std::to_string(budget.max_subsets),
                         subset_count(free_points));
}

Minimum exhaustive_min(const Predimension& p, PointSet x, PointSet within, const SearchBudget& budget) {
  const PointSet free = within - x;
  check_subset_budget(free.size(), budget, "d_partial");
  Minimum best;
  for_each_subset(free, [&](PointSet s) {
    const int v = p.delta(x | s);
    if (v < best.value) best = {v, x | s};
  });
  return best;
}

// Min-cut formulation for |Y| - r(Y): triples are profits, points outside X
// are unit costs, and a triple forces its points.
class TripleFlow {
public:
  TripleFlow(const PreStructure& m, PointSet x, PointSet within) {
    for (const auto& t : m.triples)
      if (triple_points(t).subset_of(within)) triples_.push_back(triple_points(t));
    const int nt = static_cast<int>(triples_.size());
    nodes_ = 2 + nt + kMaxPoints;
    adj_.assign(nodes_, {});
    for (int i = 0; i < nt; ++i) {
      add_edge(source(), 2 + i, 1);
      for (int q : triples_[i] - x) add_edge(2 + i, point_node(q), kInf);
    }
    for (int q : within - x) add_edge(point_node(q), sink(), 1);
    x_ = x;
  }

  Minimum solve() {
    int flow = 0;
    while (int f = augment()) flow += f;
    const int profit = static_cast<int>(triples_.size()) - flow;
    // Residual reachability from the source gives the least optimal closure.
    std::vector<char> seen(nodes_, 0);
    std::deque<int> q{source()};
    seen[source()] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int e : adj_[u])
        if (edges_[e].cap > 0 && !seen[edges_[e].to]) {
          seen[edges_[e].to] = 1;
          q.push_back(edges_[e].to);
        }
    }
    PointSet y = x_;
    for (int i = 0; i < kMaxPoints; ++i)
      if (seen[point_node(i)]) y.insert(i);
    return {x_.size() - profit, y};
  }

private:
  static constexpr int kInf = 1 << 29;
  struct Edge {
    int to;
    int cap;
  };
  int source() const { return 0; }
  int sink() const { return 1; }
  int point_node(int i) const { return 2 + static_cast<int>(triples_.size()) + i; }
  void add_edge(int u, int v, int cap) {
    adj_[u].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({v, cap});
    adj_[v].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({u, 0});
  }
  int augment() {
    std::vector<int> via(nodes_, -1);
    std::deque<int> q{source()};
    via[source()] = -2;
    while (!q.empty() && via[sink()] == -1) {
      const int u = q.front();
      q.pop_front();
      for (int e : adj_[u])
        if (edges_[e].cap > 0 && via[edges_[e].to] == -1) {
          via[edges_[e].to] = e;
          q.push_back(edges_[e].to);
        }
    }
    if (via[sink()] == -1) return 0;
    int f = kInf;
    for (int v = sink(); v != source(); v = edges_[via[v] ^ 1].to) f = std::min(f, edges_[via[v]].cap);
    for (int v = sink(); v != source(); v = edges_[via[v] ^ 1].to) {
      edges_[via[v]].cap -= f;
      edges_[via[v] ^ 1].cap += f;
    }
    return f;
  }

  std::vector<PointSet> triples_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  int nodes_ = 0;
  PointSet x_;
};

// Branch and bound for submodular delta. For Y <= Z <= T = Y u R,
//   delta(Z) >= delta(Y) + sum_{z in Z\Y} (delta(T) - delta(T - z)),
// since each marginal along a chain from Y to Z dominates the marginal at T.
class BranchBound {
public:
  BranchBound(const Predimension& p, const SearchBudget& budget) : p_(p), budget_(budget) {}

  Minimum run(PointSet x, PointSet within) {
    best_ = {p_.delta(x), x};
    visit(x, within - x);
    return best_;
  }

private:
  void visit(PointSet y, PointSet rest) {
    if (++nodes_ > budget_.max_nodes)
      throw BudgetExceeded("d_partial: branch-and-bound node budget exhausted", static_cast<double>(nodes_));
    const int fy = p_.delta(y);
    if (fy < best_.value) best_ = {fy, y};
    if (rest.empty()) return;
    const PointSet top = y | rest;
    const int ft = p_.delta(top);
    if (ft < best_.value) best_ = {ft, top};
    int bound = fy;
    for (int z : rest) bound += std::min(0, ft - p_.delta(top.without(z)));
    if (bound >= best_.value) return;
    const int z = rest.lowest();
    visit(y.with(z), rest.without(z));
    visit(y, rest.without(z));
  }

  const Predimension& p_;
  const SearchBudget& budget_;
  Minimum best_;
  std::uint64_t nodes_ = 0;
};

Method resolve(const Predimension& p, Method m) {
  if (m == Method::BranchBound && !p.submodular())
    throw InputError("branch-and-bound needs a submodular preset binding");
  return m;
}

Minimum minimize(const Predimension& p, PointSet x, PointSet within, Method method, const SearchBudget& budget) {
  if (!x.subset_of(p.domain())) throw InputError("d_partial: set leaves the preset's domain");
  within = (within & p.domain()) | x;
  method = resolve(p, method);
  if (method == Method::Exhaustive) return exhaustive_min(p, x, within, budget);
  if (method == Method::Auto && p.spec().preset == Preset::TrivialR)
    return TripleFlow(p.structure(), x, within).solve();
  if (method == Method::BranchBound || p.submodular()) return BranchBound(p, budget).run(x, within);
  return exhaustive_min(p, x, within, budget);
}

}  // namespace

int d_partial_within(const Predimension& p, PointSet x, PointSet within, Method method, const SearchBudget& budget) {
  return minimize(p, x, within, method, budget).value;
}

int d_partial(const Predimension& p, PointSet x, Method method, const SearchBudget& budget) {
  return minimize(p, x, p.domain(), method, budget).value;
}

int d_partial(const PredimensionSpec& spec, const PreStructure& m, PointSet x, Method method,
              const SearchBudget& budget) {
  return d_partial(Predimension(spec, m), x, method, budget);
}

bool is_strong(const Predimension& p, PointSet x, const SearchBudget& budget) {
  return p.delta(x) == d_partial(p, x, Method::Auto, budget);
}

bool is_strong(const PredimensionSpec& spec, const PreStructure& m, PointSet x, const SearchBudget& budget) {
  return is_strong(Predimension(spec, m), x, budget);
}

PointSet strong_closure(const Predimension& p, PointSet x, const SearchBudget& budget) {
  if (p.spec().preset == Preset::TrivialR) return TripleFlow(p.structure(), x, p.domain()).solve().witness;
  if (p.submodular()) {
    // Minimizers form a lattice; drop every point some minimizer avoids.
    const Minimum top = minimize(p, x, p.domain(), Method::Auto, budget);
    PointSet within = top.witness;
    for (int z : top.witness - x)
      if (minimize(p, x, within.without(z), Method::Auto, budget).value == top.value) within.erase(z);
    return within;
  }
  const PointSet free = p.domain() - x;
  check_subset_budget(free.size(), budget, "strong_closure");
  int best = INT_MAX;
  std::vector<PointSet> minimizers;
  for_each_subset(free, [&](PointSet s) {
    const int v = p.delta(x | s);
    if (v < best) {
      best = v;
      minimizers.clear();
    }
    if (v == best) minimizers.push_back(x | s);
  });
  std::vector<PointSet> minimal;
  for (PointSet y : minimizers) {
    const bool has_smaller = std::any_of(minimizers.begin(), minimizers.end(),
                                         [&](PointSet z) { return z != y && z.subset_of(y); });
    if (!has_smaller) minimal.push_back(y);
  }
  if (minimal.size() != 1)
    throw ConsistencyError("strong_closure: " + std::to_string(minimal.size()) + " subset-minimal minimizers");
  return minimal.front();
}

PointSet strong_closure(const PredimensionSpec& spec, const PreStructure& m, PointSet x, const SearchBudget& budget) {
  return strong_closure(Predimension(spec, m), x, budget);
}

GsResult gs_check(const Predimension& p, const SearchBudget& budget) {
  const PointSet dom = p.domain();
  const bool small = subset_count(dom.size()) <= static_cast<double>(budget.max_subsets);
  if (!small && !p.submodular()) check_subset_budget(dom.size(), budget, "gs_check");
  if (small) {
    for (int k = 1; k <= dom.size(); ++k) {
      GsResult r;
      for_each_subset_of_size(dom, k, [&](PointSet s) {
        if (!r.ok) return;
        const int v = p.delta(s);
        if (v < 0) r = {false, s, v};
      });
      if (!r.ok) return r;
    }
    return {};
  }
  const Minimum m = minimize(p, PointSet(), dom, Method::Auto, budget);
  if (m.value >= 0) return {};
  PointSet w = m.witness;
  for (bool changed = true; changed;) {
    changed = false;
    for (int z : w)
      if (p.delta(w.without(z)) < 0) {
        w.erase(z);
        changed = true;
        break;
      }
  }
  return {false, w, p.delta(w)};
}

GsResult gs_check(const PredimensionSpec& spec, const PreStructure& m, const SearchBudget& budget) {
  return gs_check(Predimension(spec, m), budget);
}

bool is_strong_embedding(const PredimensionSpec& spec, const PreStructure& m, const PreStructure& l,
                         const Embedding& e, bool exhaustive, const SearchBudget& budget) {
  const std::string problem = embedding_problem(m, l, e);
  if (!problem.empty()) throw InputError("invalid embedding: " + problem);
  const Predimension pm(spec, m), pl(spec, l);
  if (!e.image(pm.domain()).subset_of(pl.domain())) throw InputError("invalid embedding: domain sort not preserved");
  if (!exhaustive && pm.submodular() && pl.submodular()) return is_strong(pl, e.image(pm.domain()), budget);
  check_subset_budget(pm.domain().size(), budget, "is_strong_embedding");
  bool ok = true;
  for_each_subset(pm.domain(), [&](PointSet s) {
    if (ok && d_partial(pm, s, Method::Auto, budget) != d_partial(pl, e.image(s), Method::Auto, budget)) ok = false;
  });
  return ok;
}

}  // namespace hrush
