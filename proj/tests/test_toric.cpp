#include <doctest.h>

#include "hrush/toric.hpp"
#include "support.hpp"

#include <numeric>
#include <random>

using namespace hrush;
using namespace hrush::testing;

namespace {

using Rows = std::vector<std::vector<long long>>;

IntMatrix mat(const Rows& r, int cols = -1) { return IntMatrix::from_rows(r, cols); }

Rows random_rows(std::mt19937_64& rng, int m, int n, int bound) {
  Rows r(m, std::vector<long long>(n));
  for (auto& row : r)
    for (auto& x : row) x = uniform_int(rng, -bound, bound);
  return r;
}

// Laplace expansion on machine integers.
long long laplace(const Rows& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 1;
  if (n == 1) return a[0][0];
  long long det = 0;
  for (int c = 0; c < n; ++c) {
    if (a[0][c] == 0) continue;
    Rows minor;
    for (int i = 1; i < n; ++i) {
      std::vector<long long> row;
      for (int j = 0; j < n; ++j)
        if (j != c) row.push_back(a[i][j]);
      minor.push_back(row);
    }
    det += (c % 2 ? -1 : 1) * a[0][c] * laplace(minor);
  }
  return det;
}

std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int from) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = from; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Determinantal divisors: D_k = gcd of all k x k minors; d_k = D_k / D_{k-1}.
std::vector<long long> invariants_by_minors(const Rows& a) {
  const int m = static_cast<int>(a.size()), n = m ? static_cast<int>(a[0].size()) : 0;
  std::vector<long long> out;
  long long prev = 1;
  for (int k = 1; k <= std::min(m, n); ++k) {
    long long g = 0;
    for (const auto& rs : subsets(m, k))
      for (const auto& cs : subsets(n, k)) {
        Rows minor;
        for (int i : rs) {
          std::vector<long long> row;
          for (int j : cs) row.push_back(a[i][j]);
          minor.push_back(row);
        }
        g = std::gcd(g, laplace(minor));
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

bool is_diagonal(const IntMatrix& d) {
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (i != j && d.at(i, j) != 0) return false;
  return true;
}

bool unimodular(const IntMatrix& u) { return abs(determinant(u)) == 1; }

// Saturated lattices have all invariant factors 1.
bool saturated(const IntMatrix& l) {
  for (const Int& d : snf(l).invariants())
    if (d != 1) return false;
  return true;
}

LatticeCoset coset(int n, const Rows& g, const std::vector<std::string>& q) {
  std::vector<Rational> t;
  for (const auto& s : q) t.push_back(parse_rational(s));
  return LatticeCoset(n, mat(g, n), t);
}

// Number of theta in (Q/Z)^n with denominator N solving g . theta = q.
long long count_torsion_points(const LatticeCoset& a, const LatticeCoset& b, long long big_n) {
  const IntMatrix g = a.gens().stacked(b.gens());
  std::vector<Rational> q = a.torsion();
  q.insert(q.end(), b.torsion().begin(), b.torsion().end());
  const int n = a.n();
  long long count = 0;
  std::vector<long long> th(n, 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i < g.rows() && ok; ++i) {
      Rational s = 0;
      for (int j = 0; j < n; ++j) s += Rational(g.at(i, j)) * Rational(static_cast<long>(th[j]), static_cast<long>(big_n));
      s -= q[i];
      s.canonicalize();
      ok = s.get_den() == 1;
    }
    if (ok) ++count;
    int i = n - 1;
    while (i >= 0 && th[i] == big_n - 1) th[i--] = 0;
    if (i < 0) break;
    ++th[i];
  }
  return count;
}

}  // namespace

TEST_CASE("snf examples") {
  const Snf s = snf(mat({{2, 4}, {6, 8}}));
  CHECK(s.d == mat({{2, 0}, {0, 4}}));
  CHECK(s.u * mat({{2, 4}, {6, 8}}) * s.v == s.d);

  const Snf id = snf(IntMatrix::identity(3));
  CHECK(id.d == IntMatrix::identity(3));
  CHECK(id.u == IntMatrix::identity(3));
  CHECK(id.v == IntMatrix::identity(3));

  const Snf z = snf(IntMatrix(2, 3));
  CHECK(z.d.is_zero());
  CHECK(z.rank() == 0);

  const Snf empty = snf(IntMatrix(0, 2));
  CHECK(empty.d.rows() == 0);
  CHECK(empty.v == IntMatrix::identity(2));
}

TEST_CASE("snf against determinantal divisors") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    const int m = uniform_int(rng, 1, 6), n = uniform_int(rng, 1, 6);
    Rows a = random_rows(rng, m, n, 20);
    if (trial % 5 == 0 && m > 1) a[m - 1] = a[0];  // force rank drops
    const IntMatrix am = mat(a);
    const Snf s = snf(am);
    REQUIRE(s.u * am * s.v == s.d);
    CHECK(is_diagonal(s.d));
    CHECK(unimodular(s.u));
    CHECK(unimodular(s.v));
    const auto inv = s.invariants();
    for (std::size_t i = 0; i + 1 < inv.size(); ++i) CHECK(inv[i + 1] % inv[i] == 0);
    for (std::size_t i = 0; i < inv.size(); ++i) {
      CHECK(inv[i] > 0);
      CHECK(s.d.at(static_cast<int>(i), static_cast<int>(i)) == inv[i]);  // nonzero factors come first
    }
    const auto oracle = invariants_by_minors(a);
    REQUIRE(oracle.size() == inv.size());
    for (std::size_t i = 0; i < inv.size(); ++i) CHECK(inv[i] == Int(std::to_string(oracle[i])));
  }
}

TEST_CASE("determinant against Laplace expansion") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = uniform_int(rng, 0, 6);
    const Rows a = random_rows(rng, n, n, 20);
    CHECK(determinant(mat(a, n)) == Int(std::to_string(laplace(a))));
  }
  CHECK_THROWS_AS(determinant(IntMatrix(2, 3)), InputError);
}

TEST_CASE("hnf is canonical") {
  CHECK(hnf(mat({{2, 3}, {1, 0}})).h == mat({{1, 0}, {0, 3}}));
  CHECK(hnf(mat({{0, 0}, {-4, -6}})).h == mat({{4, 6}}));
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = uniform_int(rng, 1, 5), n = uniform_int(rng, 1, 5);
    const IntMatrix a = mat(random_rows(rng, m, n, 9));
    const Hnf f = hnf(a);
    CHECK(unimodular(f.t));
    const IntMatrix ta = f.t * a;
    CHECK(ta.top_rows(f.h.rows()) == f.h);
    for (int i = f.h.rows(); i < m; ++i)
      for (int j = 0; j < n; ++j) CHECK(ta.at(i, j) == 0);
    int last = -1;
    for (int i = 0; i < f.h.rows(); ++i) {
      int p = 0;
      while (f.h.at(i, p) == 0) ++p;
      CHECK(p > last);
      CHECK(f.h.at(i, p) > 0);
      for (int k = 0; k < i; ++k) {
        CHECK(f.h.at(k, p) >= 0);
        CHECK(f.h.at(k, p) < f.h.at(i, p));
      }
      last = p;
    }
    // Another generating set of the same lattice gives the same basis.
    IntMatrix mix = IntMatrix::identity(m);
    for (int s = 0; s < 6 && m > 1; ++s) {
      const int i = uniform_int(rng, 0, m - 1), j = (i + uniform_int(rng, 1, m - 1)) % m;
      const int k = uniform_int(rng, -3, 3);
      for (int c = 0; c < m; ++c) mix.at(i, c) += k * mix.at(j, c);
    }
    CHECK(hnf(mix * a).h == f.h);
    CHECK(hnf(a.stacked(a.top_rows(1))).h == f.h);
  }
}

TEST_CASE("lattice_ops examples") {
  const LatticeOps a = lattice_ops(mat({{1, 0}}), mat({{0, 1}}));
  CHECK(lattice_rank(a.sum) == 2);
  CHECK(a.intersection.rows() == 0);
  CHECK(a.rank == 1);

  CHECK(saturation(mat({{2, 0}})) == mat({{1, 0}}));

  const LatticeOps b = lattice_ops(mat({{2, 3}}), mat({{1, 0}}));
  CHECK(lattice_rank(b.sum) == 2);
  CHECK(abs(determinant(b.sum)) == 3);
  CHECK(saturation(b.sum) == IntMatrix::identity(2));

  CHECK(lattice_intersection(mat({{2, 0}}), mat({{3, 0}})) == mat({{6, 0}}));
  CHECK(lattice_intersection(mat({{2, 0}, {0, 1}}), mat({{1, 1}})) == mat({{2, 2}}));
  CHECK_THROWS_AS(lattice_ops(mat({{1, 0}}), mat({{1, 0, 0}})), InputError);
}

TEST_CASE("lattice rank laws and membership oracles") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = uniform_int(rng, 1, 5);
    const IntMatrix l1 = mat(random_rows(rng, uniform_int(rng, 0, n), n, 6), n);
    const IntMatrix l2 = mat(random_rows(rng, uniform_int(rng, 0, n), n, 6), n);
    const LatticeOps o = lattice_ops(l1, l2);
    const int r1 = lattice_rank(l1), r2 = lattice_rank(l2);
    const int rs = lattice_rank(o.sum), ri = lattice_rank(o.intersection);
    CHECK(rs <= r1 + r2);
    CHECK(rs + ri == r1 + r2);
    CHECK(o.rank == r1);
    // Saturation: contains L1, same rank, all invariant factors 1.
    CHECK(lattice_includes(o.saturation, l1));
    CHECK(lattice_rank(o.saturation) == r1);
    CHECK(saturated(o.saturation));
    // Intersection lies in both.
    CHECK(lattice_includes(lattice_basis(l1), o.intersection));
    CHECK(lattice_includes(lattice_basis(l2), o.intersection));
    CHECK(lattice_includes(o.sum, l1));
    CHECK(lattice_includes(o.sum, l2));
    if (trial % 20 == 0 && n <= 3) {
      // Small vectors in both lattices are in the intersection.
      std::vector<Int> x(n);
      std::vector<int> v(n, -4);
      while (true) {
        for (int j = 0; j < n; ++j) x[j] = v[j];
        if (lattice_contains(l1, x) && lattice_contains(l2, x)) CHECK(lattice_contains(o.intersection, x));
        int i = n - 1;
        while (i >= 0 && v[i] == 4) v[i--] = -4;
        if (i < 0) break;
        ++v[i];
      }
    }
  }
}

TEST_CASE("left_kernel") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = uniform_int(rng, 1, 6), n = uniform_int(rng, 1, 4);
    const IntMatrix a = mat(random_rows(rng, m, n, 5));
    const IntMatrix k = left_kernel(a);
    CHECK(k.rows() == m - lattice_rank(a));
    if (k.rows() > 0) CHECK((k * a).is_zero());
    CHECK(saturated(k.rows() ? k : IntMatrix(0, m)));
  }
}

TEST_CASE("coset construction and JSON") {
  const LatticeCoset c = coset_from_json(nlohmann::json::parse(R"({"n":2,"gens":[[2,3]],"torsion":["1/3"]})"));
  CHECK(c.dim() == 1);
  CHECK(c.torsion() == std::vector<Rational>{Rational(1, 3)});
  CHECK(coset_from_json(to_json(c)) == c);
  CHECK(to_json(c).dump() == R"({"gens":[[2,3]],"n":2,"torsion":["1/3"]})");

  // Torsion values are reduced mod 1.
  CHECK(coset(1, {{1}}, {"-1/2"}) == coset(1, {{1}}, {"3/2"}));
  CHECK(coset(1, {{1}}, {"-1/2"}).torsion()[0] == Rational(1, 2));
  // Same coset, different presentation: x = -1, y = 1 versus xy = -1, y = 1.
  CHECK(coset(2, {{1, 0}, {0, 1}}, {"1/2", "0"}) == coset(2, {{1, 1}, {0, 1}}, {"1/2", "0"}));
  // Redundant consistent rows are dropped.
  CHECK(coset(2, {{1, 0}, {2, 0}}, {"1/4", "1/2"}) == coset(2, {{1, 0}}, {"1/4"}));
  // x^2 = -1 is fine, x = 1 together with x^2 = -1 is not.
  CHECK(coset(1, {{2}}, {"1/2"}).dim() == 0);
  CHECK_THROWS_AS(coset(2, {{1, 0}, {2, 0}}, {"0", "1/2"}), InputError);
  CHECK_THROWS_AS(coset(2, {{1, 0}}, {}), InputError);
  CHECK_THROWS_AS(coset(2, {{1, 0, 0}}, {"0"}), InputError);

  const LatticeCoset full = coset_from_json(nlohmann::json::parse(R"({"n":3})"));
  CHECK(full.dim() == 3);
  CHECK_THROWS_AS(coset_from_json(nlohmann::json::parse(R"({"n":2,"gens":[[1,0]],"torsion":["x"]})")), InputError);
  CHECK_THROWS_AS(coset_from_json(nlohmann::json::parse(R"({"n":2,"gens":[[1,0]],"torsion":["1/0"]})")), InputError);
  CHECK_THROWS_AS(coset_from_json(nlohmann::json::parse(R"({"n":2,"gens":[[1]],"torsion":["0"]})")), InputError);
  CHECK_THROWS_AS(coset_from_json(nlohmann::json::parse(R"({"n":2,"bogus":1})")), InputError);
  CHECK_THROWS_AS(coset_from_json(nlohmann::json::parse(R"([1,2])")), InputError);

  // Big entries survive the round trip as strings.
  IntMatrix big(1, 2);
  big.at(0, 0) = Int("123456789012345678901234567890");
  big.at(0, 1) = 1;
  CHECK(matrix_from_json(to_json(big)) == big);
}

TEST_CASE("intersect_cosets examples") {
  const auto a = intersect_cosets(coset(2, {{1, 0}}, {"0"}), coset(2, {{0, 1}}, {"0"}));
  CHECK(a.dim == 0);
  CHECK(a.components == 1);

  const auto b = intersect_cosets(coset(2, {{2, 3}}, {"0"}), coset(2, {{1, 0}}, {"0"}));
  CHECK(b.dim == 0);
  CHECK(b.components == 3);

  const auto c = intersect_cosets(coset(2, {{1, 0}}, {"0"}), coset(2, {{1, 0}}, {"1/2"}));
  CHECK(c.dim == -1);
  CHECK(c.components == 0);

  // x^2 = 1 meets x = -1 in one component of dimension 1.
  const auto d = intersect_cosets(coset(2, {{2, 0}}, {"0"}), coset(2, {{1, 0}}, {"1/2"}));
  CHECK(d.dim == 1);
  CHECK(d.components == 1);
  // x^2 = 1 and y^2 = 1 against the full torus: four points.
  const auto e = intersect_cosets(coset(2, {{2, 0}, {0, 2}}, {"0", "0"}), coset(2, {}, {}));
  CHECK(e.dim == 0);
  CHECK(e.components == 4);

  CHECK_THROWS_AS(intersect_cosets(coset(2, {}, {}), coset(3, {}, {})), InputError);
}

TEST_CASE("component counts against a torsion point scan") {
  std::mt19937_64 rng(16);
  const std::vector<std::string> values = {"0", "1/2", "1/3", "2/3", "1/4"};
  int nonempty = 0, empty = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = uniform_int(rng, 1, 2);
    const int rw = uniform_int(rng, 1, n);
    const Rows gw = random_rows(rng, rw, n, 3), gs = random_rows(rng, n, n, 3);
    std::vector<std::string> qw, qs;
    for (int i = 0; i < rw; ++i) qw.push_back(values[uniform_int(rng, 0, 4)]);
    for (int i = 0; i < n; ++i) qs.push_back(values[uniform_int(rng, 0, 4)]);
    std::optional<LatticeCoset> w, s;
    try {
      w.emplace(coset(n, gw, qw));
      s.emplace(coset(n, gs, qs));
    } catch (const InputError&) {
      continue;
    }
    const IntMatrix sum = w->gens().stacked(s->gens());
    if (lattice_rank(sum) != n) continue;
    // All solutions are torsion points of order dividing 12 * |minor|.
    Int bound = 1;
    for (const Int& d : snf(sum).invariants()) bound *= d;
    const long long big_n = 12 * bound.get_si();
    if (big_n > 400) continue;
    const auto x = intersect_cosets(*w, *s);
    const long long pts = count_torsion_points(*w, *s, big_n);
    if (pts == 0) {
      CHECK(x.dim == -1);
      ++empty;
    } else {
      CHECK(x.dim == 0);
      CHECK(x.components == static_cast<long>(pts));
      ++nonempty;
    }
  }
  CHECK(nonempty > 20);
  CHECK(empty > 5);
}

TEST_CASE("typicality examples") {
  const LatticeCoset x1 = coset(2, {{1, 0}}, {"0"}), y1 = coset(2, {{0, 1}}, {"0"});
  Typicality t = typicality(x1, x1);
  CHECK(t.expected == 0);
  CHECK(t.actual == 1);
  CHECK(t.atypical);
  CHECK(t.defect == 1);

  t = typicality(x1, y1);
  CHECK(t.expected == 0);
  CHECK(t.actual == 0);
  CHECK_FALSE(t.atypical);
  CHECK(t.defect == 0);

  t = typicality(coset(3, {{1, 0, 0}}, {"0"}), coset(3, {{1, 0, 0}, {0, 1, 0}}, {"0", "0"}));
  CHECK(t.expected == 0);
  CHECK(t.actual == 1);
  CHECK(t.atypical);

  t = typicality(x1, coset(2, {{1, 0}}, {"1/2"}));
  CHECK(t.empty);
  CHECK_FALSE(t.atypical);

  // A point meeting a curve: raw expected -1, floor 0, typical.
  t = typicality(coset(2, {{1, 0}, {0, 1}}, {"0", "0"}), x1);
  CHECK(t.expected == -1);
  CHECK(t.actual == 0);
  CHECK_FALSE(t.atypical);
}

TEST_CASE("transverse intersections are typical") {
  std::mt19937_64 rng(17);
  int transverse = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = uniform_int(rng, 1, 5);
    const IntMatrix gw = mat(random_rows(rng, uniform_int(rng, 0, n), n, 4), n);
    const IntMatrix gs = mat(random_rows(rng, uniform_int(rng, 0, n), n, 4), n);
    const LatticeCoset w = LatticeCoset::subgroup(gw), s = LatticeCoset::subgroup(gs);
    const Typicality t = typicality(w, s);
    REQUIRE_FALSE(t.empty);  // subgroups always meet
    CHECK(t.actual >= t.expected);
    CHECK(t.actual == w.n() - lattice_rank(gw.stacked(gs)));
    if (lattice_rank(gw.stacked(gs)) == lattice_rank(gw) + lattice_rank(gs)) {
      ++transverse;
      CHECK(t.actual == t.expected);
      CHECK_FALSE(t.atypical);
    }
  }
  CHECK(transverse > 500);
}

TEST_CASE("tau_family examples") {
  const LatticeCoset x1 = coset(2, {{1, 0}}, {"0"});
  const auto fam = tau_family({x1}, 2);
  REQUIRE(fam.size() == 1);
  CHECK(fam[0] == mat({{1, 0}}));
  const TauCheck ex = verify_tau_exhaustive({x1}, fam, 2, 5, 2);
  CHECK(ex.subgroups == 120 + 120 * 119 / 2);
  CHECK(ex.atypical > 0);
  CHECK(ex.uncovered.empty());
  const TauCheck rnd = verify_tau_random({x1}, fam, 2, 5, 2000, 3);
  CHECK(rnd.uncovered.empty());

  // Without the certificate the same scan finds counterexamples.
  const TauCheck bare = verify_tau_exhaustive({x1}, {}, 2, 5, 1);
  CHECK_FALSE(bare.uncovered.empty());

  const LatticeCoset full = coset(2, {}, {});
  CHECK(tau_family({full}, 2).empty());
  CHECK(verify_tau_exhaustive({full}, {}, 2, 5, 2).atypical == 0);

  const LatticeCoset point = coset(2, {{1, 0}, {0, 1}}, {"0", "0"});
  CHECK(tau_family({point}, 2).empty());
  CHECK(verify_tau_exhaustive({point}, {}, 2, 5, 2).atypical == 0);

  CHECK_THROWS_AS(tau_family({x1}, 3), InputError);
}

TEST_CASE("tau_family covers random coset unions") {
  std::mt19937_64 rng(18);
  const std::vector<std::string> values = {"0", "1/2", "1/3", "1/5"};
  for (int trial = 0; trial < 30; ++trial) {
    const int n = uniform_int(rng, 2, 4);
    std::vector<LatticeCoset> w;
    while (static_cast<int>(w.size()) < uniform_int(rng, 1, 3)) {
      const int r = uniform_int(rng, 0, n);
      std::vector<std::string> q;
      for (int i = 0; i < r; ++i) q.push_back(values[uniform_int(rng, 0, 3)]);
      try {
        w.push_back(coset(n, random_rows(rng, r, n, 3), q));
      } catch (const InputError&) {
      }
    }
    const auto fam = tau_family(w, n);
    for (const auto& f : fam) {
      CHECK(saturated(f));
      CHECK(f.rows() > 0);
      CHECK(f.rows() < n);
    }
    const TauCheck c = verify_tau_random(w, fam, n, 5, 300, trial);
    CHECK(c.subgroups == 300);
    CHECK(c.uncovered.empty());
    if (n == 2) CHECK(verify_tau_exhaustive(w, fam, n, 3, 2).uncovered.empty());
  }
}
