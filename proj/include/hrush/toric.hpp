#pragma once

#include "hrush/core.hpp"

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hrush {

using Int = mpz_class;
using Rational = mpq_class;

// Dense integer matrix with exact entries.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  static IntMatrix identity(int n);
  // Rows must share one length; `cols` fixes the width of an empty list.
  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows, int cols = -1);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Int& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Int& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  std::vector<Int> row(int i) const;

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix transposed() const;
  IntMatrix stacked(const IntMatrix& below) const;  // rows of this, then rows of `below`
  IntMatrix top_rows(int k) const;
  IntMatrix columns(int from, int to) const;        // columns [from, to)
  bool is_zero() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Int> a_;
};

// Exact determinant (fraction-free elimination); square matrices only.
Int determinant(const IntMatrix& a);

struct Snf {
  IntMatrix u;  // m x m, unimodular
  IntMatrix d;  // m x n, diagonal, d1 | d2 | ..., all >= 0
  IntMatrix v;  // n x n, unimodular
  std::vector<Int> invariants() const;  // nonzero diagonal entries
  int rank() const { return static_cast<int>(invariants().size()); }
};

// U * A * V = D.
Snf snf(const IntMatrix& a);

struct Hnf {
  IntMatrix h;  // nonzero rows of the row-style Hermite normal form
  IntMatrix t;  // unimodular, t * A = [h; 0]
};

// Row-style HNF: pivots move right row by row, are positive, and entries
// above a pivot lie in [0, pivot).
Hnf hnf(const IntMatrix& a);

// Lattices in Z^n are given by generating rows and returned as HNF bases.
IntMatrix lattice_basis(const IntMatrix& gens);
int lattice_rank(const IntMatrix& gens);
IntMatrix lattice_sum(const IntMatrix& l1, const IntMatrix& l2);
IntMatrix lattice_intersection(const IntMatrix& l1, const IntMatrix& l2);
IntMatrix saturation(const IntMatrix& l);
// Integer vectors x with x * A = 0 (rows of the result, HNF basis).
IntMatrix left_kernel(const IntMatrix& a);
bool lattice_contains(const IntMatrix& l, const std::vector<Int>& x);
bool lattice_includes(const IntMatrix& outer, const IntMatrix& inner);

struct LatticeOps {
  IntMatrix sum;
  IntMatrix intersection;
  IntMatrix saturation;
  int rank = 0;
};

LatticeOps lattice_ops(const IntMatrix& l1, const IntMatrix& l2);

// The torsion coset { t in (C*)^n : t^m_i = exp(2 pi i q_i) } for the rows
// m_i of `gens`. Stored canonically: gens is the HNF basis and torsion holds
// the character values on it, reduced into [0, 1).
class LatticeCoset {
public:
  // Throws InputError on shape mismatch or an inconsistent system.
  LatticeCoset(int n, const IntMatrix& gens, const std::vector<Rational>& torsion);
  static LatticeCoset subgroup(const IntMatrix& gens);  // all torsion values 0

  int n() const { return n_; }
  const IntMatrix& gens() const { return gens_; }
  const std::vector<Rational>& torsion() const { return torsion_; }
  int dim() const { return n_ - gens_.rows(); }

  friend bool operator==(const LatticeCoset&, const LatticeCoset&) = default;

private:
  LatticeCoset() = default;
  int n_ = 0;
  IntMatrix gens_;
  std::vector<Rational> torsion_;
};

struct CosetIntersection {
  int dim = -1;        // -1 when empty
  Int components = 0;  // torsion cosets of the connected part
  IntMatrix lattice;   // character lattice of the connected part (saturated), when nonempty
};

CosetIntersection intersect_cosets(const LatticeCoset& w, const LatticeCoset& s);

struct Typicality {
  bool empty = false;
  int expected = 0;  // dim W + dim S - n
  int actual = -1;
  bool atypical = false;  // actual > max(expected, 0)
  int defect = 0;         // max(0, actual - max(expected, 0))
};

Typicality typicality(const LatticeCoset& w, const LatticeCoset& s);

// Saturated character lattices of the proper positive-dimensional members
// of W, deduplicated and sorted.
std::vector<IntMatrix> tau_family(const std::vector<LatticeCoset>& w, int n);

struct TauCounterexample {
  int member = 0;  // index into W
  IntMatrix subgroup;
  Typicality report;
};

struct TauCheck {
  std::uint64_t subgroups = 0;
  std::uint64_t atypical = 0;
  std::vector<TauCounterexample> uncovered;
};

// An atypical component U of W_j cap S is covered when some family lattice
// lies inside U's character lattice (U sits in a torsion coset of that
// subtorus).
void check_tau_covering(const std::vector<LatticeCoset>& w, const std::vector<IntMatrix>& family,
                        const IntMatrix& subgroup_gens, TauCheck& out);

// Every subgroup generated by up to `max_rows` rows with entries in
// [-bound, bound] (rows taken as an unordered set without repeats).
TauCheck verify_tau_exhaustive(const std::vector<LatticeCoset>& w, const std::vector<IntMatrix>& family, int n,
                               int bound, int max_rows);
// `count` subgroups with 1..n random rows, entries in [-bound, bound].
TauCheck verify_tau_random(const std::vector<LatticeCoset>& w, const std::vector<IntMatrix>& family, int n, int bound,
                           std::uint64_t count, std::uint64_t seed);

// JSON. Entries are numbers when they fit in 64 bits, decimal strings
// otherwise; torsion values are strings "p/q".
nlohmann::json to_json(const IntMatrix& m);
IntMatrix matrix_from_json(const nlohmann::json& j, int cols = -1);
nlohmann::json to_json(const LatticeCoset& c);
LatticeCoset coset_from_json(const nlohmann::json& j);
Rational parse_rational(const std::string& s);
std::string format_rational(const Rational& q);

}  // namespace hrush
