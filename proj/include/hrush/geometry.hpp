#pragma once

#include "hrush/predim.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hrush {

// d(x / A) = d_partial(A u {x}) - d_partial(A).
int d_of(const Predimension& p, int x, PointSet a, const SearchBudget& budget = {});

// cl(A) = { x in the domain : d(x / A) = 0 }.
PointSet geom_closure(const Predimension& p, PointSet a, const SearchBudget& budget = {});

struct PregeometryViolation {
  enum class Law { Inflationary, Monotone, Idempotent, Exchange } law;
  PointSet a;
  int x = -1;
  int y = -1;
};

struct PregeometryReport {
  std::vector<PregeometryViolation> violations;
  bool ok() const { return violations.empty(); }
};

std::string to_string(PregeometryViolation::Law law);

using ClosureFn = std::function<PointSet(PointSet)>;

// Checks the closure laws over every A inside `domain`: A <= cl(A),
// cl(A) <= cl(A u {x}), cl(cl(A)) = cl(A), and exchange
// (x in cl(A u {y}) \ cl(A) implies y in cl(A u {x})). Finite character is
// automatic on finite sets. Refuses domains above `max_points`.
PregeometryReport verify_pregeometry(PointSet domain, const ClosureFn& closure, int max_points = 10);
PregeometryReport verify_pregeometry(const Predimension& p, int max_points = 10, const SearchBudget& budget = {});

// dim(S) over parameters C: the largest d_partial(C u t) - d_partial(C) over
// the tuples t of S. nullopt stands for the empty family (minus infinity).
std::optional<int> dim_set(const Predimension& p, const std::vector<std::vector<int>>& tuples, PointSet c,
                           const SearchBudget& budget = {});

}  // namespace hrush
