#include "hrush/amalgam.hpp"

#include <algorithm>
#include <climits>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>

namespace hrush {

namespace {

using json = nlohmann::json;

int mod(long long v, int p) {
  const long long r = v % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

int inverse(int a, int p) {
  int r = 1;
  for (int e = p - 2, b = a; e > 0; e >>= 1, b = b * b % p)
    if (e & 1) r = r * b % p;
  return r;
}

// Coefficients of v in the (independent) basis, or nullopt if v is outside
// their span.
std::optional<std::vector<int>> solve(const std::vector<std::vector<int>>& basis, const std::vector<int>& v, int p) {
  const int r = static_cast<int>(basis.size()), len = static_cast<int>(v.size());
  std::vector<std::vector<int>> a(len, std::vector<int>(r + 1));
  for (int i = 0; i < len; ++i) {
    for (int j = 0; j < r; ++j) a[i][j] = mod(basis[j][i], p);
    a[i][r] = mod(v[i], p);
  }
  std::vector<int> pivot_row(r, -1);
  int row = 0;
  for (int col = 0; col < r && row < len; ++col) {
    int sel = row;
    while (sel < len && a[sel][col] == 0) ++sel;
    if (sel == len) continue;
    std::swap(a[sel], a[row]);
    const int inv = inverse(a[row][col], p);
    for (auto& x : a[row]) x = x * inv % p;
    for (int i = 0; i < len; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const int f = a[i][col];
      for (int j = 0; j <= r; ++j) a[i][j] = mod(a[i][j] - f * a[row][j], p);
    }
    pivot_row[col] = row++;
  }
  for (int i = row; i < len; ++i)
    if (a[i][r] != 0) return std::nullopt;
  std::vector<int> out(r, 0);
  for (int c = 0; c < r; ++c)
    if (pivot_row[c] >= 0) out[c] = a[pivot_row[c]][r];
  return out;
}

RankOracle amalgamate_linear(const RankOracle& ob, const RankOracle& oc, const PreStructure& a, const Embedding& a_to_b,
                             const Embedding& a_to_c, const std::vector<int>& c_to_d, const std::string& name) {
  const int p = ob.field();
  if (oc.field() != p) throw InputError("oracle kinds incompatible: '" + name + "' uses different fields");
  std::vector<int> basis_pts;  // base indices whose C vectors form a basis of span_C(A)
  std::vector<std::vector<int>> basis_c, basis_b;
  for (int i = 0; i < a.size(); ++i) {
    const bool in_b = ob.ground().contains(a_to_b.map[i]), in_c = oc.ground().contains(a_to_c.map[i]);
    if (in_b != in_c) throw InputError("oracle '" + name + "' disagrees on the base ground set");
    if (!in_c) continue;
    auto trial = basis_c;
    trial.push_back(oc.vector_of(a_to_c.map[i]));
    if (gf_rank(trial, p) > static_cast<int>(basis_c.size())) {
      basis_c = std::move(trial);
      basis_b.push_back(ob.vector_of(a_to_b.map[i]));
      basis_pts.push_back(i);
    }
  }
  if (gf_rank(basis_b, p) != static_cast<int>(basis_b.size()))
    throw InputError("linear representations disagree over the base of '" + name + "'");
  const int lb = ob.vector_length();
  auto push_through = [&](const std::vector<int>& coeffs) {
    std::vector<int> out(lb, 0);
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      for (int t = 0; t < lb; ++t) out[t] = mod(out[t] + coeffs[j] * basis_b[j][t], p);
    return out;
  };
  for (int i = 0; i < a.size(); ++i) {
    if (!oc.ground().contains(a_to_c.map[i])) continue;
    const auto coeffs = solve(basis_c, oc.vector_of(a_to_c.map[i]), p);
    if (!coeffs || push_through(*coeffs) != ob.vector_of(a_to_b.map[i]))
      throw InputError("linear representations disagree over the base of '" + name + "'");
  }

  // Extend the base basis to a basis of everything C spans.
  PointSet c_base;
  for (int i = 0; i < a.size(); ++i) c_base.insert(a_to_c.map[i]);
  auto full = basis_c;
  for (int c : oc.ground()) {
    if (c_base.contains(c)) continue;
    auto trial = full;
    trial.push_back(oc.vector_of(c));
    if (gf_rank(trial, p) > static_cast<int>(full.size())) full = std::move(trial);
  }
  const int r = static_cast<int>(basis_c.size()), s = static_cast<int>(full.size()) - r;

  std::map<int, std::vector<int>> vectors;
  for (int bpt : ob.ground()) {
    auto v = ob.vector_of(bpt);
    v.resize(lb + s, 0);
    vectors[bpt] = v;
  }
  for (int c : oc.ground()) {
    if (c_base.contains(c)) continue;
    const auto coeffs = solve(full, oc.vector_of(c), p);
    auto v = push_through(std::vector<int>(coeffs->begin(), coeffs->begin() + r));
    v.insert(v.end(), coeffs->begin() + r, coeffs->end());
    vectors[c_to_d[c]] = v;
  }
  if (vectors.empty()) return RankOracle::linear(p, {});
  return RankOracle::linear(p, std::move(vectors));
}

struct TripleTable {
  int n = 0;
  std::vector<bool> bits;

  explicit TripleTable(const PreStructure& m) : n(m.size()), bits(static_cast<std::size_t>(n) * n * n) {
    for (const auto& t : m.triples) bits[key(t[0], t[1], t[2])] = true;
  }
  std::size_t key(int x, int y, int z) const { return (static_cast<std::size_t>(x) * n + y) * n + z; }
  bool has(int x, int y, int z) const { return bits[key(x, y, z)]; }
};

std::string encode(std::vector<Triple> ts, int base_size, int n) {
  std::sort(ts.begin(), ts.end());
  std::string out = std::to_string(base_size) + "+" + std::to_string(n - base_size) + ":";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(ts[i][0]) + "." + std::to_string(ts[i][1]) + "." + std::to_string(ts[i][2]);
  }
  return out;
}

PreStructure template_structure(const std::vector<std::string>& base_labels, int new_points,
                                const std::vector<Triple>& triples) {
  PreStructure ext;
  ext.points = base_labels;
  for (int j = 0; j < new_points; ++j) ext.points.push_back("n" + std::to_string(j));
  ext.triples = triples;
  ext.normalize();
  return ext;
}

// Depth-first search over triple sets touching the new points.
class TemplateSearch {
public:
  TemplateSearch(const PreStructure& base, int m, int lo, int hi, const TemplateBudget& budget)
      : base_(base), b_(base.size()), n_(b_ + m), m_(m), lo_(lo), hi_(hi), budget_(budget) {
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y)
        for (int z = 0; z < n_; ++z)
          if (x >= b_ || y >= b_ || z >= b_) candidates_.push_back({x, y, z});
    for (const auto& t : base.triples) base_masks_.push_back(triple_points(t));
  }

  std::map<std::string, ExtensionTemplate> run() {
    visit(0);
    return found_;
  }

private:
  int count_inside(const std::vector<PointSet>& masks, PointSet y) const {
    int c = 0;
    for (PointSet t : masks) c += t.subset_of(y);
    return c;
  }

  // Every constraint that can change after adding triple `t`.
  bool admissible(PointSet t) const {
    const PointSet base = PointSet::first(b_), all = PointSet::first(n_);
    bool ok = true;
    for_each_subset(all - t, [&](PointSet rest) {
      if (!ok) return;
      const PointSet z = rest | t;
      const int news = count_inside(chosen_masks_, z);
      if (z.size() - count_inside(base_masks_, z) - news < 0) ok = false;          // GS of ext
      else if (base.subset_of(z) && (z - base).size() - news < 0) ok = false;  // delta(Y / base)
    });
    return ok;
  }

  void record() {
    const int rel = m_ - static_cast<int>(chosen_.size());
    if (rel < lo_ || rel > hi_) return;
    std::vector<Triple> all = base_.triples;
    all.insert(all.end(), chosen_.begin(), chosen_.end());
    std::string form = canonical_form(all, b_, n_, false);
    if (found_.count(form)) return;
    ExtensionTemplate t;
    t.ext = template_structure(base_.points, m_, all);
    t.base_size = b_;
    t.rel_delta = rel;
    found_.emplace(std::move(form), std::move(t));
  }

  void visit(std::size_t from) {
    if (++nodes_ > budget_.max_nodes)
      throw BudgetExceeded("template enumeration exceeds the node budget", static_cast<double>(nodes_));
    record();
    if (m_ - static_cast<int>(chosen_.size()) <= lo_) return;  // more triples only lower rel_delta
    for (std::size_t i = from; i < candidates_.size(); ++i) {
      const PointSet t = triple_points(candidates_[i]);
      chosen_.push_back(candidates_[i]);
      chosen_masks_.push_back(t);
      if (admissible(t)) visit(i + 1);
      chosen_.pop_back();
      chosen_masks_.pop_back();
    }
  }

  const PreStructure& base_;
  int b_, n_, m_, lo_, hi_;
  TemplateBudget budget_;
  std::vector<Triple> candidates_;
  std::vector<PointSet> base_masks_;
  std::vector<Triple> chosen_;
  std::vector<PointSet> chosen_masks_;
  std::uint64_t nodes_ = 0;
  std::map<std::string, ExtensionTemplate> found_;
};

// GS structures on n indexed points, one per isomorphism class.
std::vector<PreStructure> gs_bases(int n, const TemplateBudget& budget) {
  PreStructure empty;
  std::map<std::string, ExtensionTemplate> raw = TemplateSearch(empty, n, 0, n, budget).run();
  std::map<std::string, PreStructure> classes;
  for (auto& [form, t] : raw) {
    std::string key = canonical_form(t.ext.triples, 0, n, true);
    if (classes.count(key)) continue;
    PreStructure s = t.ext;
    for (int i = 0; i < n; ++i) s.points[i] = "b" + std::to_string(i);
    classes.emplace(std::move(key), std::move(s));
  }
  std::vector<PreStructure> out;
  for (auto& [k, s] : classes) out.push_back(std::move(s));
  return out;
}

std::vector<int> identity_map(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

ExtensionTemplate free_point_template() {
  ExtensionTemplate t;
  t.ext = template_structure({}, 1, {});
  t.rel_delta = 1;
  return t;
}

const char* action_name(StepRecord::Action a) { return a == StepRecord::Action::Realize ? "realize" : "free_point"; }

}  // namespace

// ---------------------------------------------------------------------------

Amalgam free_amalgam(const PredimensionSpec& spec, const PreStructure& b, const PreStructure& c, const PreStructure& a,
                     const Embedding& a_to_b, const Embedding& a_to_c, bool check_strong) {
  if (static_cast<int>(a_to_b.map.size()) != a.size() || static_cast<int>(a_to_c.map.size()) != a.size())
    throw InputError("base embeddings must cover the base");
  if (check_strong) {
    if (!is_strong_embedding(spec, a, b, a_to_b)) throw InputError("base not strong in B");
    if (!is_strong_embedding(spec, a, c, a_to_c)) throw InputError("base not strong in C");
  }

  Amalgam out;
  PreStructure& d = out.d;
  d.points = b.points;
  d.spec = b.spec;
  out.from_b.map = identity_map(b.size());

  std::vector<int> c_to_d(c.size(), -1);
  for (int i = 0; i < a.size(); ++i) c_to_d[a_to_c.map[i]] = a_to_b.map[i];
  std::set<std::string> used(b.points.begin(), b.points.end());
  for (int i = 0; i < c.size(); ++i) {
    if (c_to_d[i] >= 0) continue;
    std::string label = c.points[i];
    while (used.count(label)) label += "'";
    used.insert(label);
    c_to_d[i] = d.size();
    d.points.push_back(label);
  }
  if (d.size() > kMaxPoints) throw InputError("amalgam exceeds the point limit");
  out.from_c.map = c_to_d;

  d.triples = b.triples;
  for (const auto& t : c.triples) d.triples.push_back({c_to_d[t[0]], c_to_d[t[1]], c_to_d[t[2]]});
  d.normalize();

  if (b.functions.size() != c.functions.size() ||
      !std::equal(b.functions.begin(), b.functions.end(), c.functions.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; }))
    throw InputError("function names differ between the sides");
  for (const auto& [name, tb] : b.functions) {
    std::vector<int> table(d.size(), -1);
    std::copy(tb.begin(), tb.end(), table.begin());
    for (int i = 0; i < c.size(); ++i) {
      const int v = c.functions.at(name)[i];
      if (v < 0) continue;
      const int di = c_to_d[i], dv = c_to_d[v];
      if (table[di] >= 0 && table[di] != dv) throw InputError("function '" + name + "' disagrees on the base");
      table[di] = dv;
    }
    d.functions[name] = std::move(table);
  }

  if (b.sorts.has_value() != c.sorts.has_value()) throw InputError("only one side is two-sorted");
  if (b.sorts) {
    Sorts s;
    s.d = b.sorts->d;
    s.a = b.sorts->a;
    s.bijection.assign(d.size(), -1);
    std::copy(b.sorts->bijection.begin(), b.sorts->bijection.end(), s.bijection.begin());
    for (int i = 0; i < c.size(); ++i) {
      if (c.sorts->d.contains(i)) s.d.insert(c_to_d[i]);
      if (c.sorts->a.contains(i)) s.a.insert(c_to_d[i]);
      const int v = c.sorts->bijection[i];
      if (v >= 0) s.bijection[c_to_d[i]] = c_to_d[v];
    }
    d.sorts = std::move(s);
  }

  for (const auto& [name, ob] : b.oracles) {
    const auto it = c.oracles.find(name);
    if (it == c.oracles.end()) throw InputError("oracle kinds incompatible: '" + name + "' missing in C");
    const RankOracle& oc = it->second;
    if (ob.kind() != oc.kind() || ob.kind() == OracleKind::Uniform)
      throw InputError("oracle kinds incompatible: '" + name + "'");
    if (ob.kind() == OracleKind::Free) {
      PointSet ground = ob.ground();
      for (int i : oc.ground()) ground.insert(c_to_d[i]);
      d.oracles.emplace(name, RankOracle::free(ground));
    } else {
      d.oracles.emplace(name, amalgamate_linear(ob, oc, a, a_to_b, a_to_c, c_to_d, name));
    }
  }
  for (const auto& [name, oc] : c.oracles)
    if (!b.oracles.count(name)) throw InputError("oracle kinds incompatible: '" + name + "' missing in B");

  validate(d);
  return out;
}

// ---------------------------------------------------------------------------

std::string canonical_form(const std::vector<Triple>& triples, int base_size, int n, bool permute_base) {
  std::vector<int> perm = identity_map(n);
  std::string best;
  bool first = true;
  do {
    do {
      std::vector<Triple> ts;
      ts.reserve(triples.size());
      for (const auto& t : triples) ts.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
      std::string s = encode(std::move(ts), base_size, n);
      if (first || s < best) best = std::move(s);
      first = false;
    } while (std::next_permutation(perm.begin() + base_size, perm.end()));
  } while (permute_base && std::next_permutation(perm.begin(), perm.begin() + base_size));
  return best;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExtensionTemplate::labeled_form() const { return canonical_form(ext.triples, base_size, ext.size(), false); }
std::string ExtensionTemplate::id() const { return canonical_form(ext.triples, base_size, ext.size(), true); }
std::string ExtensionTemplate::hash() const { return fnv1a_hex(id()); }

void require_relational(const PredimensionSpec& spec) {
  if (spec.preset != Preset::TrivialR)
    throw InputError("extension templates are supported for the trivial_r preset only");
}

std::vector<ExtensionTemplate> templates_over_base(const PredimensionSpec& spec, const PreStructure& base,
                                                   int new_points, int lo, int hi, const TemplateBudget& budget) {
  require_relational(spec);
  if (new_points < 0) throw InputError("template size smaller than its base");
  if (base.size() + new_points > kMaxPoints) throw InputError("template exceeds the point limit");
  std::vector<ExtensionTemplate> out;
  for (auto& [form, t] : TemplateSearch(base, new_points, lo, hi, budget).run()) out.push_back(std::move(t));
  return out;
}

std::vector<ExtensionTemplate> enumerate_templates(const PredimensionSpec& spec, int base_size, int ext_size, int lo,
                                                   int hi, const TemplateBudget& budget) {
  require_relational(spec);
  if (base_size < 0 || ext_size < base_size) throw InputError("template size smaller than its base");
  std::map<std::string, ExtensionTemplate> classes;
  for (const PreStructure& base : gs_bases(base_size, budget))
    for (auto& t : templates_over_base(spec, base, ext_size - base_size, lo, hi, budget)) {
      std::string key = t.id();
      classes.emplace(std::move(key), std::move(t));
    }
  std::vector<ExtensionTemplate> out;
  for (auto& [k, t] : classes) out.push_back(std::move(t));
  return out;
}

std::vector<Embedding> find_embeddings(const PredimensionSpec& spec, const PreStructure& m, const ExtensionTemplate& t,
                                       const std::vector<int>& anchor, bool require_strong) {
  require_relational(spec);
  const int b = t.base_size, n = t.ext.size();
  if (static_cast<int>(anchor.size()) != b) throw InputError("anchor not isomorphic to base: wrong size");
  const TripleTable tm(m), tt(t.ext);
  std::vector<int> img(n, -1);
  PointSet used;
  for (int i = 0; i < b; ++i) {
    if (anchor[i] < 0 || anchor[i] >= m.size() || used.contains(anchor[i]))
      throw InputError("anchor not isomorphic to base: bad point");
    used.insert(anchor[i]);
    img[i] = anchor[i];
  }
  // Triples among positions [0, upto] that involve `upto` agree on both sides.
  auto consistent = [&](int upto) {
    for (int x = 0; x <= upto; ++x)
      for (int y = 0; y <= upto; ++y)
        for (int z = 0; z <= upto; ++z) {
          if (x != upto && y != upto && z != upto) continue;
          if (tt.has(x, y, z) != tm.has(img[x], img[y], img[z])) return false;
        }
    return true;
  };
  for (int i = 0; i < b; ++i)
    if (!consistent(i)) throw InputError("anchor not isomorphic to base");

  std::optional<Predimension> p;
  if (require_strong) p.emplace(spec, m);
  std::vector<Embedding> out;
  auto extend = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      Embedding e{img};
      if (!p || is_strong(*p, e.image(PointSet::first(n)))) out.push_back(std::move(e));
      return;
    }
    for (int x = 0; x < m.size(); ++x) {
      if (used.contains(x)) continue;
      img[pos] = x;
      if (consistent(pos)) {
        used.insert(x);
        self(self, pos + 1);
        used.erase(x);
      }
    }
    img[pos] = -1;
  };
  extend(extend, b);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<DeficitEntry> richness_deficit(const PredimensionSpec& spec, const PreStructure& m, int k,
                                           const RichnessOptions& opts) {
  require_relational(spec);
  if (k < 0 || opts.template_cap < 0) throw InputError("richness level must be non-negative");
  const int max_ext = k + opts.template_cap;
  const Predimension p(spec, m);
  const TripleTable table(m);
  std::map<std::string, std::vector<ExtensionTemplate>> families;
  std::vector<DeficitEntry> out;

  for (int size = 0; size <= std::min(k, max_ext - 1) && size <= m.size(); ++size) {
    for_each_subset_of_size(m.all(), size, [&](PointSet a) {
      if (!is_strong(p, a)) return;
      const PreStructure base = induced(m, a);
      const std::string key = encode(base.triples, size, size);
      auto fam = families.find(key);
      if (fam == families.end()) {
        std::vector<ExtensionTemplate> all;
        for (int extra = 1; size + extra <= max_ext; ++extra)
          for (auto& t : templates_over_base(spec, base, extra, 0, extra)) all.push_back(std::move(t));
        fam = families.emplace(key, std::move(all)).first;
      }
      std::map<std::string, const ExtensionTemplate*> missing;
      for (const auto& t : fam->second) missing.emplace(t.labeled_form(), &t);

      const std::vector<int> base_idx = a.indices();
      for (int extra = 1; size + extra <= max_ext && !missing.empty(); ++extra) {
        for_each_subset_of_size(m.all() - a, extra, [&](PointSet q) {
          if (missing.empty()) return;
          std::vector<int> pts = base_idx;
          for (int i : q) pts.push_back(i);
          const int n = static_cast<int>(pts.size());
          std::vector<Triple> ts;
          for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
              for (int z = 0; z < n; ++z)
                if (table.has(pts[x], pts[y], pts[z])) ts.push_back({x, y, z});
          const auto it = missing.find(canonical_form(ts, size, n, false));
          if (it == missing.end()) return;
          if (opts.require_strong && !is_strong(p, a | q)) return;
          missing.erase(it);
        });
      }
      for (const auto& [form, t] : missing) out.push_back({a, *t});
    });
  }
  return out;
}

// ---------------------------------------------------------------------------

PreStructure realize(const PreStructure& m, PointSet base, const ExtensionTemplate& t,
                     const std::vector<std::string>& labels) {
  if (base.size() != t.base_size || static_cast<int>(labels.size()) != t.new_points())
    throw InputError("realization does not match the template");
  if (!base.subset_of(m.all())) throw InputError("realization base outside the structure");
  PreStructure c = t.ext;
  const PreStructure a = induced(m, base);
  for (int i = 0; i < t.base_size; ++i) c.points[i] = a.points[i];
  for (int j = 0; j < t.new_points(); ++j) c.points[t.base_size + j] = labels[j];
  return free_amalgam(PredimensionSpec{}, m, c, a, Embedding{base.indices()}, Embedding{identity_map(t.base_size)},
                      false)
      .d;
}

BuildTrace generic_build(const PredimensionSpec& spec, const BuildOptions& opts) {
  require_relational(spec);
  if (opts.steps < 0 || opts.size_cap < 0 || opts.size_cap > kMaxPoints || opts.level < 0 || opts.id_period < 0)
    throw InputError("build caps out of range");
  BuildTrace trace;
  trace.spec = spec;
  trace.options = opts;
  trace.chain.emplace_back();
  std::mt19937_64 rng(opts.seed);
  std::uint64_t turn = 0;
  std::map<std::pair<int, int>, std::uint64_t> cursor;

  for (int step = 1; step <= opts.steps; ++step) {
    const PreStructure& cur = trace.chain.back();
    const int room = opts.size_cap - cur.size();
    if (room <= 0) break;

    StepRecord rec;
    rec.step = step;
    PointSet base;
    ExtensionTemplate chosen = free_point_template();
    const bool id_step = opts.id_period > 0 && step % opts.id_period == 0;
    if (!id_step) {
      std::vector<DeficitEntry> fits;
      for (auto& e : richness_deficit(spec, cur, opts.level, opts.richness))
        if (e.templ.new_points() <= room) fits.push_back(std::move(e));
      if (!fits.empty()) {
        // Rotate over shapes (base size, new points), then over template
        // classes of that shape in canonical order; the seed picks the base.
        std::map<std::pair<int, int>, std::set<std::string>> shapes;
        for (const auto& e : fits) shapes[{e.templ.base_size, e.templ.new_points()}].insert(e.templ.id());
        const auto shape = std::next(shapes.begin(), static_cast<long>(turn++ % shapes.size()));
        const std::set<std::string>& ids = shape->second;
        const std::string target = *std::next(ids.begin(), static_cast<long>(cursor[shape->first]++ % ids.size()));
        std::vector<const DeficitEntry*> pool;
        for (const auto& e : fits)
          if (e.templ.id() == target) pool.push_back(&e);
        const DeficitEntry* pick = pool[rng() % pool.size()];
        base = pick->base;
        chosen = pick->templ;
        rec.action = StepRecord::Action::Realize;
      }
    }
    rec.base = cur.labels_of(base);
    rec.template_form = chosen.labeled_form();
    rec.template_hash = chosen.hash();
    for (int j = 0; j < chosen.new_points(); ++j) rec.new_points.push_back("p" + std::to_string(step) + "_" + std::to_string(j));

    PreStructure next = realize(cur, base, chosen, rec.new_points);
    trace.embeddings.push_back(Embedding{identity_map(cur.size())});
    trace.log.push_back(std::move(rec));
    trace.chain.push_back(std::move(next));
  }
  return trace;
}

// ---------------------------------------------------------------------------

json trace_to_json(const BuildTrace& t) {
  json j;
  j["spec"] = format_spec(t.spec);
  j["seed"] = t.options.seed;
  j["caps"] = {{"steps", t.options.steps},
               {"size_cap", t.options.size_cap},
               {"level", t.options.level},
               {"id_period", t.options.id_period},
               {"template_cap", t.options.richness.template_cap},
               {"require_strong", t.options.richness.require_strong}};
  j["chain"] = json::array();
  for (const auto& s : t.chain) j["chain"].push_back(to_json(s));
  j["embeddings"] = json::array();
  for (const auto& e : t.embeddings) j["embeddings"].push_back(e.map);
  j["log"] = json::array();
  for (const auto& r : t.log) {
    j["log"].push_back({{"step", r.step},
                        {"action", action_name(r.action)},
                        {"base", r.base},
                        {"template", r.template_form},
                        {"hash", r.template_hash},
                        {"new_points", r.new_points},
                        {"skipped", r.skipped}});
  }
  return j;
}

BuildTrace trace_from_json(const json& j) {
  try {
    BuildTrace t;
    t.spec = parse_spec(j.at("spec").get<std::string>());
    t.options.seed = j.at("seed").get<std::uint64_t>();
    const json& caps = j.at("caps");
    t.options.steps = caps.at("steps").get<int>();
    t.options.size_cap = caps.at("size_cap").get<int>();
    t.options.level = caps.at("level").get<int>();
    t.options.id_period = caps.at("id_period").get<int>();
    t.options.richness.template_cap = caps.at("template_cap").get<int>();
    t.options.richness.require_strong = caps.at("require_strong").get<bool>();
    for (const auto& s : j.at("chain")) t.chain.push_back(structure_from_json(s));
    for (const auto& e : j.at("embeddings")) t.embeddings.push_back(Embedding{e.get<std::vector<int>>()});
    for (const auto& r : j.at("log")) {
      StepRecord rec;
      rec.step = r.at("step").get<int>();
      const std::string action = r.at("action").get<std::string>();
      if (action == "realize") rec.action = StepRecord::Action::Realize;
      else if (action == "free_point") rec.action = StepRecord::Action::FreePoint;
      else throw InputError("log: unknown action '" + action + "'");
      rec.base = r.at("base").get<std::vector<std::string>>();
      rec.template_form = r.at("template").get<std::string>();
      rec.template_hash = r.at("hash").get<std::string>();
      rec.new_points = r.at("new_points").get<std::vector<std::string>>();
      rec.skipped = r.at("skipped").get<bool>();
      t.log.push_back(std::move(rec));
    }
    if (t.chain.empty() || t.embeddings.size() + 1 != t.chain.size())
      throw InputError("trace: chain and embeddings do not line up");
    return t;
  } catch (const json::exception& e) {
    throw InputError(std::string("trace: ") + e.what());
  }
}

}  // namespace hrush
