#pragma once

#include "hrush/core.hpp"
#include "hrush/matroid.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hrush {

using Triple = std::array<int, 3>;

inline PointSet triple_points(const Triple& t) {
  return PointSet::single(t[0]) | PointSet::single(t[1]) | PointSet::single(t[2]);
}

// Two-sorted split: every point is in exactly one of `d`, `a`; `bijection`
// sends each point of `d` onto `a` (indexed by point, -1 off `d`).
struct Sorts {
  PointSet d;
  PointSet a;
  std::vector<int> bijection;

  friend bool operator==(const Sorts&, const Sorts&) = default;
};

// A finite labeled structure: points, a ternary relation, named unary
// functions, an optional two-sorted split, and named rank oracles.
//
// Point indices are positions in `points`. `triples` is kept sorted and
// duplicate-free. Function tables are indexed by point and hold -1 outside
// the function domain (the whole point set, or sort D when sorted).
struct PreStructure {
  std::vector<std::string> points;
  std::vector<Triple> triples;
  std::map<std::string, std::vector<int>> functions;
  std::optional<Sorts> sorts;
  std::map<std::string, RankOracle> oracles;
  std::optional<std::string> spec;

  int size() const { return static_cast<int>(points.size()); }
  PointSet all() const { return PointSet::first(size()); }
  PointSet function_domain() const { return sorts ? sorts->d : all(); }

  int index_of(std::string_view label) const;  // InputError if unknown
  PointSet set_of(const std::vector<std::string>& labels) const;
  std::vector<std::string> labels_of(PointSet s) const;

  const std::vector<int>& function(const std::string& name) const;  // InputError if unknown
  const RankOracle& oracle(const std::string& name) const;          // InputError if unknown

  // Sorts and deduplicates the triple list.
  void normalize();

  friend bool operator==(const PreStructure&, const PreStructure&) = default;
};

// Checks every structural invariant; throws InputError naming the offending
// path (e.g. "triples[2][1]").
void validate(const PreStructure& m);

// Number of triples with all three coordinates in X.
int triple_count(const PreStructure& m, PointSet x);

// X together with one application of each named function to each element of
// X that lies in the function's domain.
PointSet image_closure(const PreStructure& m, PointSet x, const std::vector<std::string>& fnames);

// The induced substructure on X, with points renumbered in increasing index
// order. Functions are restricted to X and must stay inside it; oracles are
// restricted to X. `old_to_new`, when given, receives the renumbering.
PreStructure induced(const PreStructure& m, PointSet x, std::vector<int>* old_to_new = nullptr);

// An injective point map from a source structure into a target.
struct Embedding {
  std::vector<int> map;  // source index -> target index

  PointSet image(PointSet s) const {
    PointSet out;
    for (int i : s) out.insert(map[i]);
    return out;
  }
  friend bool operator==(const Embedding&, const Embedding&) = default;
  friend auto operator<=>(const Embedding&, const Embedding&) = default;
};

// Empty string when `e` is a valid embedding: injective, triples preserved
// in both directions, functions commute, sorts and bijection respected, and
// every oracle of the source is rank-preserving on all subsets of its ground
// (exhaustive; BudgetExceeded past `oracle_subset_budget` subsets).
std::string embedding_problem(const PreStructure& src, const PreStructure& tgt, const Embedding& e,
                              std::uint64_t oracle_subset_budget = std::uint64_t{1} << 20);

// Embedding that matches points by label. InputError if a label is missing.
Embedding embedding_by_label(const PreStructure& src, const PreStructure& tgt);

// JSON structure files.
nlohmann::json to_json(const PreStructure& m);
PreStructure structure_from_json(const nlohmann::json& j);
PreStructure load_structure(std::string_view bytes);
PreStructure load_structure_file(const std::string& path);
std::string serialize(const PreStructure& m);

nlohmann::json oracle_to_json(const PreStructure& m, const RankOracle& o);

}  // namespace hrush
