#pragma once

#include "hrush/predim.hpp"
#include "hrush/structure.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace hrush {

// ---------------------------------------------------------------------------
// Free amalgamation

struct Amalgam {
  PreStructure d;
  Embedding from_b;
  Embedding from_c;
};

// Glues B and C over a common base A (given by embeddings into each side)
// adding nothing beyond what the sides force: triples and function tables
// are unions, free oracles stay free, and linear oracles get the block
// representation [B part | C part beyond the span of A]. Points of C
// outside A keep their labels unless those collide with B, in which case a
// prime is appended. Throws InputError if A is not strong in either side
// (when `check_strong`), or if the sides' oracles cannot be combined.
Amalgam free_amalgam(const PredimensionSpec& spec, const PreStructure& b, const PreStructure& c, const PreStructure& a,
                     const Embedding& a_to_b, const Embedding& a_to_c, bool check_strong = true);

// ---------------------------------------------------------------------------
// Extension templates
//
// Templates are relational: enumeration, realization search and the build
// loop support the trivial_r preset only.

// An extension `ext` of its first `base_size` points (the base).
struct ExtensionTemplate {
  PreStructure ext;
  int base_size = 0;
  int rel_delta = 0;

  int new_points() const { return ext.size() - base_size; }
  PreStructure base() const { return induced(ext, PointSet::first(base_size)); }
  // Canonical form up to isomorphisms fixing each base point.
  std::string labeled_form() const;
  // Canonical form up to isomorphisms fixing the base setwise.
  std::string id() const;
  // Hex FNV-1a digest of id(), used as a compact key.
  std::string hash() const;
};

// Canonical string of a relational structure on points [0, base_size) u
// [base_size, n) under permutations of the new points, or of both blocks
// when `permute_base`.
std::string canonical_form(const std::vector<Triple>& triples, int base_size, int n, bool permute_base);
std::string fnv1a_hex(const std::string& s);

void require_relational(const PredimensionSpec& spec);

struct TemplateBudget {
  std::uint64_t max_nodes = 5'000'000;
};

// All templates over the given base (kept pointwise) that add exactly
// `new_points` points, with rel_delta in [lo, hi], the extension satisfying
// GS, and delta(Y / base) >= 0 for every base <= Y <= ext. One per
// labeled_form, sorted by it.
std::vector<ExtensionTemplate> templates_over_base(const PredimensionSpec& spec, const PreStructure& base,
                                                   int new_points, int lo, int hi, const TemplateBudget& budget = {});

// All isomorphism classes (base fixed setwise) with |base| = base_size and
// |ext| = ext_size, both GS, rel_delta in [lo, hi]; sorted by id().
std::vector<ExtensionTemplate> enumerate_templates(const PredimensionSpec& spec, int base_size, int ext_size, int lo,
                                                   int hi, const TemplateBudget& budget = {});

// Embeddings of T.ext into M sending base point i to anchor[i], preserving
// triples in both directions; canonical (lexicographic) order. With
// `require_strong` only embeddings whose image is strong in M are kept.
// Throws InputError when the anchor is not isomorphic to the base.
std::vector<Embedding> find_embeddings(const PredimensionSpec& spec, const PreStructure& m, const ExtensionTemplate& t,
                                       const std::vector<int>& anchor, bool require_strong = false);

// ---------------------------------------------------------------------------
// Richness

struct RichnessOptions {
  int template_cap = 0;         // templates may have up to k + template_cap points
  bool require_strong = true;   // realizations must be strong in M
};

struct DeficitEntry {
  PointSet base;                // strong base inside M
  ExtensionTemplate templ;      // over induced(M, base), base points in index order
};

// Every (A, T) with A strong in M, T a template over M|A with at least one
// new point, at most k + template_cap points, rel_delta >= 0, that has no
// realization over A in M. Ordered by base (size, then indices) and then by
// the template's labeled form.
std::vector<DeficitEntry> richness_deficit(const PredimensionSpec& spec, const PreStructure& m, int k,
                                           const RichnessOptions& opts = {});

// ---------------------------------------------------------------------------
// Generic build

struct BuildOptions {
  int steps = 50;
  int size_cap = 40;
  int level = 2;          // k for richness
  std::uint64_t seed = 0;
  int id_period = 3;      // every id_period-th step adjoins a free point (0: never)
  RichnessOptions richness;
};

struct StepRecord {
  int step = 0;
  enum class Action { Realize, FreePoint } action = Action::FreePoint;
  std::vector<std::string> base;        // labels in the stage it extends
  std::string template_form;            // labeled form (Realize only)
  std::string template_hash;            // hash of the template class
  std::vector<std::string> new_points;
  bool skipped = false;                 // set by collapse builds

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct BuildTrace {
  PredimensionSpec spec;
  BuildOptions options;
  std::vector<PreStructure> chain;      // chain[0] is empty
  std::vector<Embedding> embeddings;    // chain[i] -> chain[i+1]
  std::vector<StepRecord> log;          // one record per step (chain[i] -> chain[i+1])
};

// Builds a chain of GS structures, each a free amalgam of the previous one
// with a template chosen from its current deficit or with a free point.
// Deficit templates are scheduled round-robin: over shapes (base size, new
// points) first, then over the classes of that shape in canonical order;
// the seed picks among the bases lacking the chosen class. Stops after
// `steps` steps, or when nothing more fits under `size_cap`.
BuildTrace generic_build(const PredimensionSpec& spec, const BuildOptions& opts);

// One realization step: the free amalgam of M with T over the base A
// (points of A in index order), new points labeled with `labels`.
PreStructure realize(const PreStructure& m, PointSet base, const ExtensionTemplate& t,
                     const std::vector<std::string>& labels);

nlohmann::json trace_to_json(const BuildTrace& t);
BuildTrace trace_from_json(const nlohmann::json& j);

}  // namespace hrush
