#include "hrush/geometry.hpp"

#include <algorithm>
#include <map>

namespace hrush {

int d_of(const Predimension& p, int x, PointSet a, const SearchBudget& budget) {
  return d_partial(p, a.with(x), Method::Auto, budget) - d_partial(p, a, Method::Auto, budget);
}

PointSet geom_closure(const Predimension& p, PointSet a, const SearchBudget& budget) {
  const int base = d_partial(p, a, Method::Auto, budget);
  PointSet cl = a;
  for (int x : p.domain() - a)
    if (d_partial(p, a.with(x), Method::Auto, budget) == base) cl.insert(x);
  return cl;
}

std::string to_string(PregeometryViolation::Law law) {
  switch (law) {
    case PregeometryViolation::Law::Inflationary: return "inflationary";
    case PregeometryViolation::Law::Monotone: return "monotone";
    case PregeometryViolation::Law::Idempotent: return "idempotent";
    case PregeometryViolation::Law::Exchange: return "exchange";
  }
  return "?";
}

PregeometryReport verify_pregeometry(PointSet domain, const ClosureFn& closure, int max_points) {
  if (domain.size() > max_points)
    throw BudgetExceeded("verify_pregeometry: " + std::to_string(domain.size()) + " points exceed the limit of " +
                             std::to_string(max_points),
                         static_cast<double>(domain.size()));
  std::map<std::uint64_t, PointSet> cl;
  auto get = [&](PointSet s) {
    auto it = cl.find(s.bits());
    if (it == cl.end()) it = cl.emplace(s.bits(), closure(s)).first;
    return it->second;
  };
  using Law = PregeometryViolation::Law;
  PregeometryReport report;
  for_each_subset(domain, [&](PointSet a) {
    const PointSet ca = get(a);
    if (!a.subset_of(ca)) report.violations.push_back({Law::Inflationary, a});
    if (get(ca) != ca) report.violations.push_back({Law::Idempotent, a});
    for (int x : domain - a) {
      const PointSet cax = get(a.with(x));
      if (!ca.subset_of(cax)) report.violations.push_back({Law::Monotone, a, x});
      for (int y : domain - a) {
        if (y == x || ca.contains(y) || !cax.contains(y)) continue;
        // y in cl(A x) \ cl(A) must force x in cl(A y).
        if (!get(a.with(y)).contains(x)) report.violations.push_back({Law::Exchange, a, y, x});
      }
    }
  });
  return report;
}

PregeometryReport verify_pregeometry(const Predimension& p, int max_points, const SearchBudget& budget) {
  return verify_pregeometry(p.domain(), [&](PointSet a) { return geom_closure(p, a, budget); }, max_points);
}

std::optional<int> dim_set(const Predimension& p, const std::vector<std::vector<int>>& tuples, PointSet c,
                           const SearchBudget& budget) {
  if (tuples.empty()) return std::nullopt;
  const int base = d_partial(p, c, Method::Auto, budget);
  int best = 0;
  bool first = true;
  for (const auto& t : tuples) {
    PointSet s = c;
    for (int i : t) {
      if (!p.domain().contains(i)) throw InputError("dim_set: tuple component outside the domain");
      s.insert(i);
    }
    const int v = d_partial(p, s, Method::Auto, budget) - base;
    best = first ? v : std::max(best, v);
    first = false;
  }
  return best;
}

}  // namespace hrush
