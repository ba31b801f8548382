#pragma once

#include "hrush/core.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hrush {

enum class OracleKind { Free, Uniform, Linear };

// A matroid rank function on a finite ground set of point indices. Stands in
// for the dimension notions (size, linear dimension, transcendence degree)
// that predimension formulas are built from.
class RankOracle {
public:
  static RankOracle free(PointSet ground);
  static RankOracle uniform(PointSet ground, int k);
  // `vectors` maps point index -> coordinate vector over GF(p). All vectors
  // share one length; p must be a prime <= 97.
  static RankOracle linear(int p, std::map<int, std::vector<int>> vectors);

  OracleKind kind() const { return kind_; }
  PointSet ground() const { return ground_; }
  int uniform_k() const { return k_; }
  int field() const { return p_; }
  int vector_length() const { return dim_; }
  const std::vector<int>& vector_of(int point) const;

  // Throws InputError when X is not inside the ground set.
  int rank(PointSet x) const;

  // Same oracle with every point index sent through `relabel` (old -> new);
  // points mapped to -1 are dropped.
  RankOracle remapped(const std::vector<int>& relabel) const;

  friend bool operator==(const RankOracle&, const RankOracle&) = default;

private:
  OracleKind kind_ = OracleKind::Free;
  PointSet ground_;
  int k_ = 0;
  int p_ = 2;
  int dim_ = 0;
  std::vector<std::vector<int>> vectors_;  // indexed by point; empty when off-ground
};

// Rank of a list of vectors over GF(p), by Gaussian elimination.
int gf_rank(std::vector<std::vector<int>> rows, int p);

bool is_prime(int p);

struct MatroidViolation {
  enum class Axiom { Bounds, Monotone, Submodular } axiom;
  PointSet x;
  PointSet y;
  std::string detail;
};

struct MatroidReport {
  std::vector<MatroidViolation> violations;
  std::uint64_t pairs_checked = 0;
  bool ok() const { return violations.empty(); }
};

using RankFn = std::function<int(PointSet)>;

// Exhaustive check of the rank axioms over all subsets of `ground` with at
// most `max_subset_size` points: bounds on every subset, monotonicity and
// submodularity on every pair. Throws BudgetExceeded (carrying the required
// number of pair checks) when that exceeds `pair_budget`.
MatroidReport verify_matroid(PointSet ground, const RankFn& rank, int max_subset_size,
                             std::uint64_t pair_budget = std::uint64_t{1} << 26);
MatroidReport verify_matroid(const RankOracle& oracle, int max_subset_size,
                             std::uint64_t pair_budget = std::uint64_t{1} << 26);

std::string to_string(MatroidViolation::Axiom a);

}  // namespace hrush
