#pragma once

#include "hrush/amalgam.hpp"

#include <map>
#include <string>
#include <vector>

namespace hrush {

// Per-template realization bounds, keyed by ExtensionTemplate::hash().
struct MuFunction {
  int default_bound = 1;
  std::map<std::string, int> overrides;

  int bound(const ExtensionTemplate& t) const;
  friend bool operator==(const MuFunction&, const MuFunction&) = default;
};

// {"default": n, "overrides": {"<hash>": n}}; bounds must be >= 1.
MuFunction mu_from_json(const nlohmann::json& j);
nlohmann::json mu_to_json(const MuFunction& mu);

// rel_delta = 0, and delta(Y / base) > 0 for every base < Y < ext.
bool is_zero_minimal(const PredimensionSpec& spec, const ExtensionTemplate& t);

// Size of a greedy packing of copies of T over the anchor with pairwise
// disjoint new points. Copies are identified by the image of the new points
// and taken in lexicographic order of their sorted index lists, so the count
// does not depend on how T's new points are numbered.
int count_copies(const PredimensionSpec& spec, const PreStructure& m, const ExtensionTemplate& t,
                 const std::vector<int>& anchor);

struct MuViolation {
  PointSet anchor;
  ExtensionTemplate templ;  // over induced(M, anchor), anchor points in index order
  int count = 0;
  int bound = 0;
};

struct MuReport {
  std::vector<MuViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks count_copies <= mu(T) for every zero-minimal template T with at
// most `max_ext` points whose base is its support (every base point lies in
// a triple with a new point), over every anchor in M. Violations are
// ordered by anchor and then by labeled form.
MuReport mu_admissible(const PredimensionSpec& spec, const PreStructure& m, const MuFunction& mu, int max_ext = 5);

// Replays the generic_build schedule for the same options, applying each
// step to the collapsed stage only when its base is present and the result
// stays mu-admissible; refused steps repeat the previous stage and are
// logged as skipped. Stage i of the result embeds (by label) into stage i
// of the uncollapsed build.
BuildTrace collapse_build(const PredimensionSpec& spec, const MuFunction& mu, const BuildOptions& opts,
                          int max_ext = 5);

}  // namespace hrush
