#include "hrush/toric.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace hrush {

namespace {

using json = nlohmann::json;

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Rational frac(const Rational& q) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  Rational r = q - Rational(fl);
  r.canonicalize();
  return r;
}

void swap_rows(IntMatrix& a, int i, int j) {
  if (i == j) return;
  for (int c = 0; c < a.cols(); ++c) std::swap(a.at(i, c), a.at(j, c));
}

void swap_cols(IntMatrix& a, int i, int j) {
  if (i == j) return;
  for (int r = 0; r < a.rows(); ++r) std::swap(a.at(r, i), a.at(r, j));
}

// row_i += k * row_j
void add_row(IntMatrix& a, int i, int j, const Int& k) {
  if (k == 0) return;
  for (int c = 0; c < a.cols(); ++c) a.at(i, c) += k * a.at(j, c);
}

void add_col(IntMatrix& a, int i, int j, const Int& k) {
  if (k == 0) return;
  for (int r = 0; r < a.rows(); ++r) a.at(r, i) += k * a.at(r, j);
}

void negate_row(IntMatrix& a, int i) {
  for (int c = 0; c < a.cols(); ++c) a.at(i, c) = -a.at(i, c);
}

json int_to_json(const Int& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

Int int_from_json(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Int(std::to_string(v.get<long long>()));
  if (v.is_string()) {
    Int out;
    if (out.set_str(v.get<std::string>(), 10) != 0) throw InputError(path + ": not an integer");
    return out;
  }
  throw InputError(path + ": expected an integer");
}

struct Consistency {
  bool ok = true;
  Snf s;
  std::vector<Rational> uq;  // U * q
};

Consistency solve_torsion(const IntMatrix& g, const std::vector<Rational>& q) {
  Consistency c;
  c.s = snf(g);
  const int r = c.s.rank();
  c.uq.assign(g.rows(), Rational(0));
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.rows(); ++j) c.uq[i] += Rational(c.s.u.at(i, j)) * q[j];
    c.uq[i] = frac(c.uq[i]);
    if (i >= r && c.uq[i] != 0) c.ok = false;
  }
  return c;
}

void scan_rows(const std::vector<LatticeCoset>& w, const std::vector<IntMatrix>& family, int n, int bound,
               int max_rows, TauCheck& out) {
  std::vector<std::vector<long long>> all;
  std::vector<long long> v(n, -bound);
  while (true) {
    if (std::any_of(v.begin(), v.end(), [](long long x) { return x != 0; })) all.push_back(v);
    int i = n - 1;
    while (i >= 0 && v[i] == bound) v[i--] = -bound;
    if (i < 0) break;
    ++v[i];
  }
  std::vector<int> pick;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (!pick.empty()) {
      std::vector<std::vector<long long>> rows;
      for (int i : pick) rows.push_back(all[i]);
      check_tau_covering(w, family, IntMatrix::from_rows(rows, n), out);
    }
    if (static_cast<int>(pick.size()) == max_rows) return;
    for (std::size_t i = from; i < all.size(); ++i) {
      pick.push_back(static_cast<int>(i));
      self(self, i + 1);
      pick.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

// ---------------------------------------------------------------------------

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows, int cols) {
  const int c = rows.empty() ? std::max(cols, 0) : static_cast<int>(rows[0].size());
  if (cols >= 0 && c != cols) throw InputError("matrix rows must have " + std::to_string(cols) + " entries");
  IntMatrix m(static_cast<int>(rows.size()), c);
  for (int i = 0; i < m.rows(); ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw InputError("matrix rows must share one length");
    for (int j = 0; j < c; ++j) m.at(i, j) = Int(std::to_string(rows[i][j]));
  }
  return m;
}

std::vector<Int> IntMatrix::row(int i) const {
  return std::vector<Int>(a_.begin() + static_cast<long>(i) * cols_, a_.begin() + static_cast<long>(i + 1) * cols_);
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) throw InputError("matrix shapes do not multiply");
  IntMatrix out(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      if (at(i, k) == 0) continue;
      for (int j = 0; j < o.cols_; ++j) out.at(i, j) += at(i, k) * o.at(k, j);
    }
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
  return out;
}

IntMatrix IntMatrix::stacked(const IntMatrix& below) const {
  if (cols_ != below.cols_) throw InputError("lattices live in different ambient dimensions");
  IntMatrix out(rows_ + below.rows_, cols_);
  std::copy(a_.begin(), a_.end(), out.a_.begin());
  std::copy(below.a_.begin(), below.a_.end(), out.a_.begin() + static_cast<long>(a_.size()));
  return out;
}

IntMatrix IntMatrix::top_rows(int k) const {
  IntMatrix out(k, cols_);
  std::copy(a_.begin(), a_.begin() + static_cast<long>(k) * cols_, out.a_.begin());
  return out;
}

IntMatrix IntMatrix::columns(int from, int to) const {
  IntMatrix out(rows_, to - from);
  for (int i = 0; i < rows_; ++i)
    for (int j = from; j < to; ++j) out.at(i, j - from) = at(i, j);
  return out;
}

bool IntMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
}

Int determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("determinant of a non-square matrix");
  const int n = m.rows();
  IntMatrix a = m;
  Int prev = 1, sign = 1;
  for (int k = 0; k < n; ++k) {
    int p = k;
    while (p < n && a.at(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      swap_rows(a, p, k);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        a.at(i, j) = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
        mpz_divexact(a.at(i, j).get_mpz_t(), a.at(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = a.at(k, k);
  }
  return n == 0 ? Int(1) : Int(sign * a.at(n - 1, n - 1));
}

// ---------------------------------------------------------------------------

std::vector<Int> Snf::invariants() const {
  std::vector<Int> out;
  for (int i = 0; i < std::min(d.rows(), d.cols()); ++i)
    if (d.at(i, i) != 0) out.push_back(d.at(i, i));
  return out;
}

Snf snf(const IntMatrix& a) {
  const int m = a.rows(), n = a.cols();
  Snf s{IntMatrix::identity(m), a, IntMatrix::identity(n)};
  IntMatrix& d = s.d;
  for (int t = 0; t < std::min(m, n); ++t) {
    // Smallest nonzero entry of the remaining block becomes the pivot.
    auto bring_min = [&](bool whole_block) {
      int bi = -1, bj = -1;
      for (int i = t; i < m; ++i)
        for (int j = t; j < n; ++j) {
          if (!whole_block && i != t && j != t) continue;
          if (d.at(i, j) == 0) continue;
          if (bi < 0 || abs(d.at(i, j)) < abs(d.at(bi, bj))) bi = i, bj = j;
        }
      if (bi < 0) return false;
      swap_rows(d, t, bi);
      swap_rows(s.u, t, bi);
      swap_cols(d, t, bj);
      swap_cols(s.v, t, bj);
      return true;
    };
    if (!bring_min(true)) break;
    while (true) {
      bool clean = true;
      for (int i = t + 1; i < m; ++i) {
        if (d.at(i, t) == 0) continue;
        const Int q = floor_div(d.at(i, t), d.at(t, t));
        add_row(d, i, t, -q);
        add_row(s.u, i, t, -q);
        if (d.at(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < n; ++j) {
        if (d.at(t, j) == 0) continue;
        const Int q = floor_div(d.at(t, j), d.at(t, t));
        add_col(d, j, t, -q);
        add_col(s.v, j, t, -q);
        if (d.at(t, j) != 0) clean = false;
      }
      if (!clean) {
        bring_min(false);
        continue;
      }
      // Divisibility: fold an offending row into the pivot row.
      int bad = -1;
      for (int i = t + 1; i < m && bad < 0; ++i)
        for (int j = t + 1; j < n; ++j)
          if (d.at(i, j) % d.at(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      add_row(d, t, bad, 1);
      add_row(s.u, t, bad, 1);
    }
    if (d.at(t, t) < 0) {
      negate_row(d, t);
      negate_row(s.u, t);
    }
  }
  return s;
}

Hnf hnf(const IntMatrix& a) {
  const int m = a.rows(), n = a.cols();
  IntMatrix h = a, t = IntMatrix::identity(m);
  int r = 0;
  for (int c = 0; c < n && r < m; ++c) {
    // Euclid on column c over rows r..m-1.
    while (true) {
      int best = -1;
      for (int i = r; i < m; ++i)
        if (h.at(i, c) != 0 && (best < 0 || abs(h.at(i, c)) < abs(h.at(best, c)))) best = i;
      if (best < 0) break;
      swap_rows(h, r, best);
      swap_rows(t, r, best);
      bool done = true;
      for (int i = r + 1; i < m; ++i) {
        if (h.at(i, c) == 0) continue;
        const Int q = floor_div(h.at(i, c), h.at(r, c));
        add_row(h, i, r, -q);
        add_row(t, i, r, -q);
        if (h.at(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (h.at(r, c) == 0) continue;
    if (h.at(r, c) < 0) {
      negate_row(h, r);
      negate_row(t, r);
    }
    for (int i = 0; i < r; ++i) {
      const Int q = floor_div(h.at(i, c), h.at(r, c));
      add_row(h, i, r, -q);
      add_row(t, i, r, -q);
    }
    ++r;
  }
  return {h.top_rows(r), t};
}

IntMatrix lattice_basis(const IntMatrix& gens) { return hnf(gens).h; }

int lattice_rank(const IntMatrix& gens) { return snf(gens).rank(); }

IntMatrix lattice_sum(const IntMatrix& l1, const IntMatrix& l2) { return lattice_basis(l1.stacked(l2)); }

IntMatrix left_kernel(const IntMatrix& a) {
  const Hnf f = hnf(a);
  const int r = f.h.rows();
  IntMatrix k(a.rows() - r, a.rows());
  for (int i = r; i < a.rows(); ++i)
    for (int j = 0; j < a.rows(); ++j) k.at(i - r, j) = f.t.at(i, j);
  return lattice_basis(k);
}

IntMatrix lattice_intersection(const IntMatrix& l1, const IntMatrix& l2) {
  const IntMatrix b1 = lattice_basis(l1), b2 = lattice_basis(l2);
  if (b1.cols() != b2.cols()) throw InputError("lattices live in different ambient dimensions");
  // x = a B1 = b B2  <=>  (a | -b) [B1; B2] = 0.
  const IntMatrix k = left_kernel(b1.stacked(b2));
  IntMatrix out = k.columns(0, b1.rows()) * b1;
  if (out.rows() == 0) return IntMatrix(0, b1.cols());
  return lattice_basis(out);
}

IntMatrix saturation(const IntMatrix& l) {
  // Integer vectors orthogonal to the right kernel of L.
  const IntMatrix right = left_kernel(l.transposed());  // rows k with L k = 0
  if (right.rows() == 0) return IntMatrix::identity(l.cols());
  return left_kernel(right.transposed());
}

bool lattice_contains(const IntMatrix& l, const std::vector<Int>& x) {
  IntMatrix row(1, static_cast<int>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j) row.at(0, static_cast<int>(j)) = x[j];
  return lattice_basis(l.stacked(row)) == lattice_basis(l);
}

bool lattice_includes(const IntMatrix& outer, const IntMatrix& inner) {
  return lattice_basis(outer.stacked(inner)) == lattice_basis(outer);
}

LatticeOps lattice_ops(const IntMatrix& l1, const IntMatrix& l2) {
  if (l1.cols() != l2.cols()) throw InputError("lattices live in different ambient dimensions");
  return {lattice_sum(l1, l2), lattice_intersection(l1, l2), saturation(l1), lattice_rank(l1)};
}

// ---------------------------------------------------------------------------

LatticeCoset::LatticeCoset(int n, const IntMatrix& gens, const std::vector<Rational>& torsion) {
  if (n < 0) throw InputError("coset: negative ambient dimension");
  if (gens.cols() != n && gens.rows() > 0) throw InputError("coset: generator rows must have n entries");
  if (static_cast<int>(torsion.size()) != gens.rows()) throw InputError("coset: one torsion value per generator");
  const IntMatrix g = gens.rows() > 0 ? gens : IntMatrix(0, n);
  if (!solve_torsion(g, torsion).ok) throw InputError("coset: inconsistent torsion values");
  const Hnf f = hnf(g);
  n_ = n;
  gens_ = f.h;
  for (int i = 0; i < f.h.rows(); ++i) {
    Rational v = 0;
    for (int j = 0; j < g.rows(); ++j) v += Rational(f.t.at(i, j)) * torsion[j];
    torsion_.push_back(frac(v));
  }
}

LatticeCoset LatticeCoset::subgroup(const IntMatrix& gens) {
  return LatticeCoset(gens.cols(), gens, std::vector<Rational>(gens.rows(), Rational(0)));
}

CosetIntersection intersect_cosets(const LatticeCoset& w, const LatticeCoset& s) {
  if (w.n() != s.n()) throw InputError("cosets live in different ambient dimensions");
  const IntMatrix g = w.gens().stacked(s.gens());
  std::vector<Rational> q = w.torsion();
  q.insert(q.end(), s.torsion().begin(), s.torsion().end());
  const Consistency c = solve_torsion(g, q);
  CosetIntersection out;
  if (!c.ok) return out;
  out.dim = w.n() - c.s.rank();
  out.components = 1;
  for (const Int& d : c.s.invariants()) out.components *= d;
  out.lattice = saturation(g);
  return out;
}

Typicality typicality(const LatticeCoset& w, const LatticeCoset& s) {
  const CosetIntersection x = intersect_cosets(w, s);
  Typicality t;
  t.expected = w.dim() + s.dim() - w.n();
  t.actual = x.dim;
  t.empty = x.dim < 0;
  if (t.empty) return t;
  t.defect = std::max(0, t.actual - std::max(t.expected, 0));
  t.atypical = t.defect > 0;
  return t;
}

std::vector<IntMatrix> tau_family(const std::vector<LatticeCoset>& w, int n) {
  std::set<std::string> seen;
  std::vector<std::pair<std::string, IntMatrix>> out;
  for (const auto& c : w) {
    if (c.n() != n) throw InputError("tau: member in a different ambient dimension");
    if (c.dim() == 0 || c.dim() == n) continue;
    IntMatrix sat = saturation(c.gens());
    std::string key = to_json(sat).dump();
    if (seen.insert(key).second) out.emplace_back(std::move(key), std::move(sat));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<IntMatrix> family;
  for (auto& [k, m] : out) family.push_back(std::move(m));
  return family;
}

void check_tau_covering(const std::vector<LatticeCoset>& w, const std::vector<IntMatrix>& family,
                        const IntMatrix& subgroup_gens, TauCheck& out) {
  const LatticeCoset s = LatticeCoset::subgroup(subgroup_gens);
  ++out.subgroups;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Typicality t = typicality(w[j], s);
    if (!t.atypical) continue;
    ++out.atypical;
    const IntMatrix component = intersect_cosets(w[j], s).lattice;
    const bool covered = std::any_of(family.begin(), family.end(),
                                     [&](const IntMatrix& f) { return lattice_includes(component, f); });
    if (!covered) out.uncovered.push_back({static_cast<int>(j), subgroup_gens, t});
  }
}

TauCheck verify_tau_exhaustive(const std::vector<LatticeCoset>& w, const std::vector<IntMatrix>& family, int n,
                               int bound, int max_rows) {
  TauCheck out;
  scan_rows(w, family, n, bound, max_rows, out);
  return out;
}

TauCheck verify_tau_random(const std::vector<LatticeCoset>& w, const std::vector<IntMatrix>& family, int n, int bound,
                           std::uint64_t count, std::uint64_t seed) {
  TauCheck out;
  std::mt19937_64 rng(seed);
  const auto span = static_cast<std::uint64_t>(2 * bound + 1);
  for (std::uint64_t k = 0; k < count; ++k) {
    const int rows = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    std::vector<std::vector<long long>> g(rows, std::vector<long long>(n));
    for (auto& row : g)
      for (auto& x : row) x = static_cast<long long>(rng() % span) - bound;
    check_tau_covering(w, family, IntMatrix::from_rows(g, n), out);
  }
  return out;
}

// ---------------------------------------------------------------------------

json to_json(const IntMatrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(int_to_json(m.at(i, j)));
    out.push_back(row);
  }
  return out;
}

IntMatrix matrix_from_json(const json& j, int cols) {
  if (!j.is_array()) throw InputError("matrix: expected an array of rows");
  int c = cols;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw InputError("matrix[" + std::to_string(i) + "]: expected an array");
    if (c < 0) c = static_cast<int>(j[i].size());
    if (static_cast<int>(j[i].size()) != c)
      throw InputError("matrix[" + std::to_string(i) + "]: rows must share one length");
  }
  IntMatrix m(static_cast<int>(j.size()), std::max(c, 0));
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k)
      m.at(i, k) = int_from_json(j[i][k], "matrix[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  return m;
}

Rational parse_rational(const std::string& s) {
  Rational q;
  const bool shape = !s.empty() && s.find_first_not_of("-0123456789/") == std::string::npos &&
                     std::count(s.begin(), s.end(), '/') <= 1 && s.back() != '/' && s.front() != '/';
  if (!shape || q.set_str(s, 10) != 0 || q.get_den() == 0) throw InputError("not a rational: '" + s + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

json to_json(const LatticeCoset& c) {
  json t = json::array();
  for (const auto& q : c.torsion()) t.push_back(format_rational(q));
  return {{"n", c.n()}, {"gens", to_json(c.gens())}, {"torsion", t}};
}

LatticeCoset coset_from_json(const json& j) {
  if (!j.is_object()) throw InputError("coset: expected an object");
  for (const auto& [k, v] : j.items())
    if (k != "n" && k != "gens" && k != "torsion") throw InputError("coset: unknown key '" + k + "'");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw InputError("coset.n: expected an integer");
  const int n = j["n"].get<int>();
  if (n < 0 || n > 64) throw InputError("coset.n: out of range");
  const IntMatrix g = j.contains("gens") ? matrix_from_json(j["gens"], n) : IntMatrix(0, n);
  std::vector<Rational> q;
  if (j.contains("torsion")) {
    if (!j["torsion"].is_array()) throw InputError("coset.torsion: expected an array");
    for (const auto& v : j["torsion"]) {
      if (v.is_number_integer()) q.emplace_back(v.get<long>());
      else if (v.is_string()) q.push_back(parse_rational(v.get<std::string>()));
      else throw InputError("coset.torsion: expected rationals as strings");
    }
  } else {
    q.assign(g.rows(), Rational(0));
  }
  return LatticeCoset(n, g, q);
}

}  // namespace hrush
