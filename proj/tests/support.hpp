#pragma once

// Shared fixtures, generators and brute-force oracles for the test suites.
// Everything here is deliberately naive and independent of the library's
// search code paths.

#include "hrush/predim.hpp"
#include "hrush/structure.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace hrush::testing {

inline PreStructure make_structure(std::vector<std::string> labels,
                                   const std::vector<std::array<std::string, 3>>& triples = {}) {
  PreStructure m;
  m.points = std::move(labels);
  for (const auto& t : triples) m.triples.push_back({m.index_of(t[0]), m.index_of(t[1]), m.index_of(t[2])});
  m.normalize();
  validate(m);
  return m;
}

// Structure with n points "0".."n-1" and index triples.
inline PreStructure indexed(int n, const std::vector<Triple>& triples = {}) {
  PreStructure m;
  for (int i = 0; i < n; ++i) m.points.push_back(std::to_string(i));
  m.triples = triples;
  m.normalize();
  return m;
}

// The five-point running example: a is free, b,c,d,e carry four triples.
inline PreStructure five_point() {
  return make_structure({"a", "b", "c", "d", "e"},
                        {{"b", "c", "d"}, {"b", "d", "e"}, {"b", "c", "e"}, {"c", "d", "e"}});
}

inline PredimensionSpec trivial_r() { return parse_spec("trivial_r"); }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline PreStructure random_relational(std::mt19937_64& rng, int n, int max_triples) {
  PreStructure m = indexed(n);
  if (n == 0) return m;
  const int k = uniform_int(rng, 0, max_triples);
  for (int i = 0; i < k; ++i)
    m.triples.push_back({uniform_int(rng, 0, n - 1), uniform_int(rng, 0, n - 1), uniform_int(rng, 0, n - 1)});
  m.normalize();
  return m;
}

// Random structure carrying every binding the presets need: oracles
// "lin" (GF(p) vectors), "free", "uni" and functions "f", "g".
inline PreStructure random_rich(std::mt19937_64& rng, int n) {
  PreStructure m = random_relational(rng, n, n + 1);
  const int p = std::vector<int>{2, 3, 5}[rng() % 3];
  const int dim = uniform_int(rng, 1, 4);
  std::map<int, std::vector<int>> vs;
  for (int i = 0; i < n; ++i) {
    std::vector<int> v(dim);
    for (auto& c : v) c = uniform_int(rng, 0, p - 1);
    vs[i] = v;
  }
  m.oracles.emplace("lin", RankOracle::linear(p, vs));
  m.oracles.emplace("free", RankOracle::free(m.all()));
  m.oracles.emplace("uni", RankOracle::uniform(m.all(), uniform_int(rng, 1, 3)));
  for (const char* f : {"f", "g"}) {
    std::vector<int> table(n);
    for (auto& t : table) t = uniform_int(rng, 0, n - 1);
    m.functions[f] = table;
  }
  validate(m);
  return m;
}

// Two-sorted structure with n points in D and n in A, bijection i -> n+i,
// oracles "lin" on D and "free" on everything.
inline PreStructure random_fusion(std::mt19937_64& rng, int n) {
  PreStructure m = indexed(2 * n);
  Sorts s;
  s.bijection.assign(2 * n, -1);
  for (int i = 0; i < n; ++i) {
    s.d.insert(i);
    s.a.insert(n + i);
    s.bijection[i] = n + i;
  }
  m.sorts = s;
  const int p = std::vector<int>{2, 3}[rng() % 2];
  std::map<int, std::vector<int>> vs;
  const int dim = uniform_int(rng, 1, 3);
  for (int i = 0; i < n; ++i) {
    std::vector<int> v(dim);
    for (auto& c : v) c = uniform_int(rng, 0, p - 1);
    vs[i] = v;
  }
  m.oracles.emplace("lin", RankOracle::linear(p, vs));
  m.oracles.emplace("free", RankOracle::free(m.all()));
  validate(m);
  return m;
}

// min delta over all supersets of x in the domain, by plain enumeration.
inline int naive_partial(const Predimension& p, PointSet x) {
  int best = INT_MAX;
  for_each_subset(p.domain() - x, [&](PointSet s) { best = std::min(best, p.delta(x | s)); });
  return best;
}

inline bool naive_gs(const Predimension& p) {
  bool ok = true;
  for_each_subset(p.domain(), [&](PointSet s) { ok = ok && p.delta(s) >= 0; });
  return ok;
}


inline bool naive_is_strong(const Predimension& p, PointSet x) { return p.delta(x) == naive_partial(p, x); }

// ---------------------------------------------------------------------------
// Relational templates, brute force. A template is a triple set on points
// [0, n) whose first b points form the base.

struct NaiveTemplate {
  int b = 0;
  int n = 0;
  std::vector<Triple> triples;  // sorted
};

inline std::vector<Triple> sorted_triples(std::vector<Triple> ts) {
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// Isomorphic by a map fixing every base point (or the base setwise).
inline bool naive_iso(const NaiveTemplate& x, const NaiveTemplate& y, bool base_setwise) {
  if (x.b != y.b || x.n != y.n || x.triples.size() != y.triples.size()) return false;
  std::vector<int> perm(x.n);
  for (int i = 0; i < x.n; ++i) perm[i] = i;
  do {
    bool keeps_base = true;
    for (int i = 0; i < x.n; ++i) {
      if ((i < x.b) != (perm[i] < x.b)) keeps_base = false;
      if (!base_setwise && i < x.b && perm[i] != i) keeps_base = false;
    }
    if (!keeps_base) continue;
    std::vector<Triple> ts;
    for (const auto& t : x.triples) ts.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
    if (sorted_triples(ts) == y.triples) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

inline int naive_delta(const std::vector<Triple>& ts, PointSet y) {
  int d = y.size();
  for (const auto& t : ts) d -= triple_points(t).subset_of(y);
  return d;
}

// Extension conditions checked subset by subset: the extension is GS and
// delta(Y) >= delta(base) for every base <= Y.
inline bool naive_template_ok(const NaiveTemplate& t) {
  const PointSet base = PointSet::first(t.b);
  bool ok = true;
  for_each_subset(PointSet::first(t.n), [&](PointSet y) {
    if (naive_delta(t.triples, y) < 0) ok = false;
    if (base.subset_of(y) && naive_delta(t.triples, y) < naive_delta(t.triples, base)) ok = false;
  });
  return ok;
}

// All templates over the given base triples that add m points, with
// relative delta >= 0 (so at most m new triples), one per base-fixing class.
inline std::vector<NaiveTemplate> naive_family(const std::vector<Triple>& base_triples, int b, int m) {
  const int n = b + m;
  std::vector<Triple> cand;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        if (x >= b || y >= b || z >= b) cand.push_back({x, y, z});
  std::vector<NaiveTemplate> out;
  std::vector<int> pick;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    NaiveTemplate t{b, n, base_triples};
    for (int i : pick) t.triples.push_back(cand[i]);
    t.triples = sorted_triples(t.triples);
    if (naive_template_ok(t)) {
      bool seen = false;
      for (const auto& o : out) seen = seen || naive_iso(t, o, false);
      if (!seen) out.push_back(t);
    }
    if (static_cast<int>(pick.size()) == m) return;
    for (std::size_t i = from; i < cand.size(); ++i) {
      pick.push_back(static_cast<int>(i));
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Triples of m induced on the listed points, renumbered by position.
inline std::vector<Triple> induced_triples(const PreStructure& m, const std::vector<int>& pts) {
  std::vector<Triple> ts;
  for (const auto& t : m.triples) {
    Triple r{};
    bool inside = true;
    for (int c = 0; c < 3; ++c) {
      const auto it = std::find(pts.begin(), pts.end(), t[c]);
      if (it == pts.end()) inside = false;
      else r[c] = static_cast<int>(it - pts.begin());
    }
    if (inside) ts.push_back(r);
  }
  return sorted_triples(ts);
}

struct NaiveDeficit {
  PointSet base;
  NaiveTemplate templ;
};

// Level-k deficit by trying every injection of every template's new points.
inline std::vector<NaiveDeficit> naive_deficit(const PreStructure& m, int k) {
  const Predimension p(trivial_r(), m);
  std::vector<NaiveDeficit> out;
  std::map<std::tuple<std::vector<Triple>, int, int>, std::vector<NaiveTemplate>> families;
  for_each_subset(m.all(), [&](PointSet a) {
    if (a.size() >= k || !naive_is_strong(p, a)) return;
    const std::vector<int> base = a.indices();
    const int b = a.size();
    const std::vector<Triple> bt = induced_triples(m, base);
    for (int extra = 1; b + extra <= k; ++extra) {
      auto fam = families.find({bt, b, extra});
      if (fam == families.end()) fam = families.emplace(std::tuple{bt, b, extra}, naive_family(bt, b, extra)).first;
      for (const auto& t : fam->second) {
        bool found = false;
        std::vector<int> pts = base;
        auto place = [&](auto&& self) -> void {
          if (found) return;
          if (static_cast<int>(pts.size()) == t.n) {
            PointSet img;
            for (int i : pts) img.insert(i);
            found = induced_triples(m, pts) == t.triples && naive_is_strong(p, img);
            return;
          }
          for (int x = 0; x < m.size(); ++x) {
            if (std::find(pts.begin(), pts.end(), x) != pts.end()) continue;
            pts.push_back(x);
            self(self);
            pts.pop_back();
          }
        };
        place(place);
        if (!found) out.push_back({a, t});
      }
    }
  });
  return out;
}

// A random GS structure on n points with up to max_triples triples.
inline PreStructure random_gs(std::mt19937_64& rng, int n, int max_triples) {
  while (true) {
    PreStructure m = random_relational(rng, n, max_triples);
    if (naive_gs(Predimension(trivial_r(), m))) return m;
  }
}

// An amalgamation instance: A strong in both B and C, sides of at most
// max_side points, all GS.
struct AmalgamInstance {
  PreStructure a, b, c;
  Embedding a_to_b, a_to_c;
};

inline AmalgamInstance random_amalgam_instance(std::mt19937_64& rng, int max_side) {
  AmalgamInstance inst;
  inst.b = random_gs(rng, uniform_int(rng, 1, max_side), max_side);
  const Predimension pb(trivial_r(), inst.b);
  PointSet a;
  for (int i = 0; i < inst.b.size(); ++i)
    if (rng() % 2) a.insert(i);
  a = strong_closure(pb, a);
  inst.a = induced(inst.b, a);
  inst.a_to_b.map = a.indices();
  for (int i = 0; i < inst.b.size(); ++i) inst.b.points[i] = "b" + std::to_string(i);
  const int extra = uniform_int(rng, 0, max_side - a.size());
  while (true) {
    PreStructure c = inst.a;
    for (int i = 0; i < extra; ++i) c.points.push_back("c" + std::to_string(i));
    const int n = c.size(), k = uniform_int(rng, 0, extra + 1);
    for (int i = 0; i < k && extra > 0; ++i) {
      Triple t{uniform_int(rng, 0, n - 1), uniform_int(rng, 0, n - 1), uniform_int(rng, 0, n - 1)};
      t[rng() % 3] = uniform_int(rng, a.size(), n - 1);
      c.triples.push_back(t);
    }
    c.normalize();
    const Predimension pc(trivial_r(), c);
    if (!naive_gs(pc) || !naive_is_strong(pc, PointSet::first(a.size()))) continue;
    inst.c = c;
    break;
  }
  inst.a_to_c.map.resize(a.size());
  for (int i = 0; i < a.size(); ++i) inst.a_to_c.map[i] = i;
  return inst;
}

}  // namespace hrush::testing
