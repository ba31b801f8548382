#pragma once

#include "hrush/core.hpp"
#include "hrush/structure.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hrush {

enum class Preset { TrivialR, FieldR, FieldF, Exp, MultiF, Aut, Fusion };

// A predimension formula together with the names it binds in a structure.
//
//   trivial_r          |X| - r(X)
//   field_r:d          d(X) - r(X)
//   field_f:d,f        d(X u f(X)) - |X|        (excluded points dropped first)
//   exp:d1,d2,f        d1(X u f(X)) - d2(X)
//   multi_f:d,f1+f2    min over I of d(X u U_{i in I} f_i(X)) - |X||I|
//   aut:d,g            d(X u g(X)) - d(X)
//   fusion:d1,d2       d1(X) + d2(b(X)) - |X|   on sort D, b the cross-sort bijection
struct PredimensionSpec {
  Preset preset = Preset::TrivialR;
  std::string d1;
  std::string d2;
  std::vector<std::string> functions;
  std::vector<std::string> excluded;  // point labels, field_f only

  friend bool operator==(const PredimensionSpec&, const PredimensionSpec&) = default;
};

PredimensionSpec parse_spec(std::string_view text);
std::string format_spec(const PredimensionSpec& spec);
std::string preset_name(Preset p);

struct SearchBudget {
  std::uint64_t max_subsets = std::uint64_t{1} << 22;  // exhaustive enumeration
  std::uint64_t max_nodes = std::uint64_t{1} << 24;    // branch-and-bound nodes
};

// How d_partial and friends minimize delta over supersets.
enum class Method {
  Auto,        // flow for trivial_r, branch-and-bound for other submodular presets, else exhaustive
  Exhaustive,  // enumerate every superset
  BranchBound  // submodular presets only
};

// A spec bound to one structure: names resolved, domain fixed.
class Predimension {
public:
  Predimension(PredimensionSpec spec, const PreStructure& m);

  const PredimensionSpec& spec() const { return spec_; }
  const PreStructure& structure() const { return *m_; }
  // Subsets on which delta is defined: sort D for fusion and for
  // function presets on sorted structures, otherwise every point.
  PointSet domain() const { return domain_; }
  // True when delta is provably submodular for this binding.
  bool submodular() const { return submodular_; }

  int delta(PointSet x) const;

private:
  int rank1(PointSet s) const { return o1_->rank(s); }
  PointSet image(const std::vector<int>& f, PointSet x) const;

  PredimensionSpec spec_;
  const PreStructure* m_;
  PointSet domain_;
  PointSet excluded_;
  bool submodular_ = true;
  const RankOracle* o1_ = nullptr;
  const RankOracle* o2_ = nullptr;
  std::vector<const std::vector<int>*> fns_;
  std::vector<PointSet> triple_masks_;
};

int delta(const PredimensionSpec& spec, const PreStructure& m, PointSet x);
int delta_rel(const PredimensionSpec& spec, const PreStructure& m, PointSet b, PointSet a);

struct GsResult {
  bool ok = true;
  PointSet witness;  // meaningful when !ok
  int witness_delta = 0;
};

// GS holds iff delta(X) >= 0 on every subset of the domain. A failing
// result carries a witness from which removing any single point restores
// delta >= 0; on domains within the exhaustive budget the witness is also a
// smallest violating set.
GsResult gs_check(const Predimension& p, const SearchBudget& budget = {});
GsResult gs_check(const PredimensionSpec& spec, const PreStructure& m, const SearchBudget& budget = {});

// min { delta(Y) : X <= Y <= domain }.
int d_partial(const Predimension& p, PointSet x, Method method = Method::Auto, const SearchBudget& budget = {});
int d_partial(const PredimensionSpec& spec, const PreStructure& m, PointSet x, Method method = Method::Auto,
              const SearchBudget& budget = {});

// Same minimum restricted to supersets inside `within`.
int d_partial_within(const Predimension& p, PointSet x, PointSet within, Method method = Method::Auto,
                     const SearchBudget& budget = {});

bool is_strong(const Predimension& p, PointSet x, const SearchBudget& budget = {});
bool is_strong(const PredimensionSpec& spec, const PreStructure& m, PointSet x, const SearchBudget& budget = {});

// The subset-least Y containing X with delta(Y) = d_partial(X). Throws
// ConsistencyError if several subset-minimal minimizers exist.
PointSet strong_closure(const Predimension& p, PointSet x, const SearchBudget& budget = {});
PointSet strong_closure(const PredimensionSpec& spec, const PreStructure& m, PointSet x,
                        const SearchBudget& budget = {});

// True iff d_partial is preserved along `e` for every subset of the source
// domain. For submodular bindings this is decided by checking that the image
// of the source domain is strong in the target; `exhaustive` forces the
// subset-by-subset comparison. Throws InputError on an invalid embedding.
bool is_strong_embedding(const PredimensionSpec& spec, const PreStructure& m, const PreStructure& l,
                         const Embedding& e, bool exhaustive = false, const SearchBudget& budget = {});

// Subsets of `universe` with exactly k points, in lexicographic order of
// their sorted index lists.
template <typename F>
void for_each_subset_of_size(PointSet universe, int k, F&& f) {
  const std::vector<int> idx = universe.indices();
  const int n = static_cast<int>(idx.size());
  if (k < 0 || k > n) return;
  std::vector<int> pos(k);
  for (int i = 0; i < k; ++i) pos[i] = i;
  while (true) {
    PointSet s;
    for (int i = 0; i < k; ++i) s.insert(idx[pos[i]]);
    f(s);
    int i = k - 1;
    while (i >= 0 && pos[i] == n - k + i) --i;
    if (i < 0) return;
    ++pos[i];
    for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace hrush
