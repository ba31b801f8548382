#include "cli.hpp"

#include "hrush/amalgam.hpp"
#include "hrush/collapse.hpp"
#include "hrush/geometry.hpp"
#include "hrush/matroid.hpp"
#include "hrush/predim.hpp"
#include "hrush/structure.hpp"
#include "hrush/toric.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace hrush::cli {

namespace {

using json = nlohmann::json;

struct Globals {
  bool json = false;
  std::uint64_t seed = 0;
  int max_points = kMaxPoints;
  std::uint64_t max_subsets = std::uint64_t{1} << 22;
  long timeout_ms = 0;
};

struct Args {
  std::string spec, structure, set, over, source, target, map, base, left, right, out, mu, tuples, oracle;
  std::string method = "auto";
  int steps = 50, cap = 40, level = 2, id_period = 3, template_cap = 0;
  int base_size = 0, size = 0, lo = 0, hi = -1, max_ext = 5, max_size = 8, max_domain = 10;
  int bound = 5, rows = 1;
  bool exhaustive = false, no_strong = false;
  std::uint64_t samples = 10000;
  std::vector<std::string> files;
};

struct Report {
  json data;
  std::string text;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot write");
  out << text;
}

PreStructure load(const std::string& path, const Globals& g) {
  PreStructure m = load_structure_file(path);
  if (m.size() > g.max_points)
    throw BudgetExceeded(path + ": " + std::to_string(m.size()) + " points exceed --max-points " +
                             std::to_string(g.max_points),
                         m.size());
  return m;
}

PredimensionSpec resolve_spec(const std::string& flag, const PreStructure* m) {
  if (!flag.empty()) return parse_spec(flag);
  if (m && m->spec) return parse_spec(*m->spec);
  throw InputError("no predimension: pass --spec or declare \"spec\" in the structure file");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

PointSet parse_set(const PreStructure& m, const std::string& text) { return m.set_of(split(text, ',')); }

json labels(const PreStructure& m, PointSet s) { return m.labels_of(s); }

std::string joined(const std::vector<std::string>& xs, const std::string& sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::string set_text(const PreStructure& m, PointSet s) { return "{" + joined(m.labels_of(s)) + "}"; }

SearchBudget budget(const Globals& g) {
  SearchBudget b;
  b.max_subsets = g.max_subsets;
  return b;
}

Method parse_method(const std::string& s) {
  if (s == "auto") return Method::Auto;
  if (s == "exhaustive") return Method::Exhaustive;
  if (s == "bb" || s == "branch-bound") return Method::BranchBound;
  throw InputError("--method: expected auto, exhaustive or bb");
}

Embedding parse_map(const PreStructure& src, const PreStructure& tgt, const std::string& text) {
  if (text.empty()) return embedding_by_label(src, tgt);
  Embedding e;
  e.map.assign(src.size(), -1);
  for (const auto& pair : split(text, ',')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw InputError("--map: expected src=tgt pairs, got '" + pair + "'");
    e.map[src.index_of(pair.substr(0, eq))] = tgt.index_of(pair.substr(eq + 1));
  }
  for (int i = 0; i < src.size(); ++i)
    if (e.map[i] < 0) throw InputError("--map: no image for '" + src.points[i] + "'");
  return e;
}

json map_json(const PreStructure& src, const PreStructure& tgt, const Embedding& e) {
  json out = json::object();
  for (int i = 0; i < src.size(); ++i) out[src.points[i]] = tgt.points[e.map[i]];
  return out;
}

// ---------------------------------------------------------------------------
// predimension

Report cmd_delta(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const int d = delta(resolve_spec(a.spec, &m), m, parse_set(m, a.set));
  return {{{"delta", d}}, std::to_string(d)};
}

Report cmd_delta_rel(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const PointSet base = parse_set(m, a.over);
  const int d = delta_rel(resolve_spec(a.spec, &m), m, parse_set(m, a.set) | base, base);
  return {{{"delta_rel", d}}, std::to_string(d)};
}

Report cmd_gs_check(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const GsResult r = gs_check(resolve_spec(a.spec, &m), m, budget(g));
  if (r.ok) return {{{"ok", true}}, "ok"};
  return {{{"ok", false}, {"witness", labels(m, r.witness)}},
          "violation: " + set_text(m, r.witness) + " has delta " + std::to_string(r.witness_delta)};
}

Report cmd_partial(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const int d = d_partial(resolve_spec(a.spec, &m), m, parse_set(m, a.set), parse_method(a.method), budget(g));
  return {{{"partial", d}}, std::to_string(d)};
}

Report cmd_strong(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const bool s = is_strong(resolve_spec(a.spec, &m), m, parse_set(m, a.set), budget(g));
  return {{{"strong", s}}, s ? "strong" : "not strong"};
}

Report cmd_closure(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const PredimensionSpec spec = resolve_spec(a.spec, &m);
  const PointSet x = parse_set(m, a.set);
  const PointSet c = strong_closure(spec, m, x, budget(g));
  const int d = d_partial(spec, m, x, Method::Auto, budget(g));
  return {{{"closure", labels(m, c)}, {"partial", d}}, set_text(m, c)};
}

Report cmd_embed_check(const Args& a, const Globals& g) {
  const PreStructure src = load(a.source, g), tgt = load(a.target, g);
  const PredimensionSpec spec = resolve_spec(a.spec, &src);
  const Embedding e = parse_map(src, tgt, a.map);
  const std::string problem = embedding_problem(src, tgt, e);
  json out = {{"valid", problem.empty()}};
  if (!problem.empty()) {
    out["problem"] = problem;
    return {out, "invalid: " + problem};
  }
  const bool strong = is_strong_embedding(spec, src, tgt, e, a.exhaustive, budget(g));
  out["strong"] = strong;
  return {out, strong ? "strong embedding" : "embedding, not strong"};
}

// ---------------------------------------------------------------------------
// amalgams and builds

Report cmd_amalgamate(const Args& a, const Globals& g) {
  const PreStructure base = load(a.base, g), b = load(a.left, g), c = load(a.right, g);
  const PredimensionSpec spec = resolve_spec(a.spec, &b);
  const Amalgam am = free_amalgam(spec, b, c, base, embedding_by_label(base, b), embedding_by_label(base, c));
  if (am.d.size() > g.max_points)
    throw BudgetExceeded("amalgam has " + std::to_string(am.d.size()) + " points", am.d.size());
  json out = {{"from_left", map_json(b, am.d, am.from_b)}, {"from_right", map_json(c, am.d, am.from_c)}};
  std::string text;
  if (!a.out.empty()) {
    write_file(a.out, serialize(am.d));
    out["out"] = a.out;
    out["points"] = am.d.size();
    text = "wrote " + a.out + " (" + std::to_string(am.d.size()) + " points)";
  } else {
    out["structure"] = to_json(am.d);
    text = serialize(am.d);
    text.pop_back();
  }
  return {out, text};
}

Report cmd_templates(const Args& a, const Globals&) {
  const PredimensionSpec spec = parse_spec(a.spec.empty() ? "trivial_r" : a.spec);
  const int hi = a.hi >= 0 ? a.hi : a.size - a.base_size;
  const auto ts = enumerate_templates(spec, a.base_size, a.size, a.lo, hi);
  json list = json::array();
  std::string text = std::to_string(ts.size()) + " templates";
  for (const auto& t : ts) {
    list.push_back({{"hash", t.hash()}, {"id", t.id()}, {"rel_delta", t.rel_delta}});
    text += "\n" + t.hash() + "  " + std::to_string(t.rel_delta) + "  " + t.id();
  }
  return {{{"count", ts.size()}, {"templates", list}}, text};
}

json deficit_json(const PreStructure& m, const std::vector<DeficitEntry>& d, std::string& text) {
  json list = json::array();
  text = std::to_string(d.size()) + " missing";
  for (const auto& e : d) {
    list.push_back({{"base", labels(m, e.base)}, {"hash", e.templ.hash()}, {"template", e.templ.labeled_form()}});
    text += "\n" + set_text(m, e.base) + "  " + e.templ.labeled_form();
  }
  return list;
}

Report cmd_richness(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  RichnessOptions opts;
  opts.template_cap = a.template_cap;
  opts.require_strong = !a.no_strong;
  const auto d = richness_deficit(resolve_spec(a.spec, &m), m, a.level, opts);
  std::string text;
  json list = deficit_json(m, d, text);
  return {{{"count", d.size()}, {"deficit", list}, {"level", a.level}}, text};
}

BuildOptions build_options(const Args& a, const Globals& g) {
  BuildOptions o;
  o.steps = a.steps;
  o.size_cap = std::min(a.cap, g.max_points);
  o.level = a.level;
  o.seed = g.seed;
  o.id_period = a.id_period;
  o.richness.template_cap = a.template_cap;
  o.richness.require_strong = !a.no_strong;
  return o;
}

Report build_report(const BuildTrace& t, const std::string& out_path) {
  int realized = 0, free_points = 0, skipped = 0;
  for (const auto& r : t.log) {
    if (r.skipped) ++skipped;
    else if (r.action == StepRecord::Action::Realize) ++realized;
    else ++free_points;
  }
  const std::string text = trace_to_json(t).dump(2) + "\n";
  if (!out_path.empty()) write_file(out_path, text);
  const int final_points = t.chain.back().size();
  json out = {{"stages", t.chain.size()}, {"final_points", final_points}, {"realized", realized},
              {"free_points", free_points}, {"skipped", skipped}, {"trace_hash", fnv1a_hex(text)}};
  if (!out_path.empty()) out["out"] = out_path;
  std::ostringstream s;
  s << t.chain.size() << " stages, " << final_points << " points; " << realized << " realized, " << free_points
    << " free, " << skipped << " skipped; trace " << fnv1a_hex(text);
  return {out, s.str()};
}

Report cmd_generic(const Args& a, const Globals& g) {
  const BuildTrace t = generic_build(parse_spec(a.spec.empty() ? "trivial_r" : a.spec), build_options(a, g));
  return build_report(t, a.out);
}

Report cmd_collapse(const Args& a, const Globals& g) {
  const MuFunction mu = mu_from_json(read_json(a.mu));
  const BuildTrace t =
      collapse_build(parse_spec(a.spec.empty() ? "trivial_r" : a.spec), mu, build_options(a, g), a.max_ext);
  return build_report(t, a.out);
}

Report cmd_mu_check(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const MuFunction mu = mu_from_json(read_json(a.mu));
  const MuReport r = mu_admissible(resolve_spec(a.spec, &m), m, mu, a.max_ext);
  json list = json::array();
  std::string text = r.ok() ? "ok" : std::to_string(r.violations.size()) + " violations";
  for (const auto& v : r.violations) {
    list.push_back({{"anchor", labels(m, v.anchor)},
                    {"bound", v.bound},
                    {"count", v.count},
                    {"hash", v.templ.hash()},
                    {"template", v.templ.labeled_form()}});
    text += "\n" + set_text(m, v.anchor) + "  " + std::to_string(v.count) + " > " + std::to_string(v.bound) + "  " +
            v.templ.labeled_form();
  }
  return {{{"ok", r.ok()}, {"violations", list}}, text};
}

// ---------------------------------------------------------------------------
// geometry and matroids

Report cmd_dim(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const json tj = read_json(a.tuples);
  if (!tj.is_array()) throw InputError(a.tuples + ": expected an array of label tuples");
  std::vector<std::vector<int>> tuples;
  for (const auto& t : tj) {
    if (!t.is_array()) throw InputError(a.tuples + ": expected an array of label tuples");
    std::vector<int> idx;
    for (const auto& l : t) {
      if (!l.is_string()) throw InputError(a.tuples + ": labels must be strings");
      idx.push_back(m.index_of(l.get<std::string>()));
    }
    tuples.push_back(idx);
  }
  const Predimension p(resolve_spec(a.spec, &m), m);
  const auto d = dim_set(p, tuples, parse_set(m, a.over), budget(g));
  if (!d) return {{{"dim", nullptr}}, "-inf"};
  return {{{"dim", *d}}, std::to_string(*d)};
}

Report cmd_geom_closure(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const Predimension p(resolve_spec(a.spec, &m), m);
  const PointSet c = geom_closure(p, parse_set(m, a.set), budget(g));
  return {{{"closure", labels(m, c)}}, set_text(m, c)};
}

Report cmd_pregeometry(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  const Predimension p(resolve_spec(a.spec, &m), m);
  const PregeometryReport r = verify_pregeometry(p, a.max_domain, budget(g));
  json list = json::array();
  std::string text = r.ok() ? "ok" : std::to_string(r.violations.size()) + " violations";
  for (const auto& v : r.violations) {
    json e = {{"law", to_string(v.law)}, {"set", labels(m, v.a)}};
    if (v.x >= 0) e["x"] = m.points[v.x];
    if (v.y >= 0) e["y"] = m.points[v.y];
    list.push_back(e);
    text += "\n" + to_string(v.law) + " at " + set_text(m, v.a);
  }
  return {{{"ok", r.ok()}, {"violations", list}}, text};
}

Report cmd_matroid_verify(const Args& a, const Globals& g) {
  const PreStructure m = load(a.structure, g);
  std::vector<std::string> names;
  if (!a.oracle.empty()) {
    m.oracle(a.oracle);
    names.push_back(a.oracle);
  } else {
    for (const auto& [name, o] : m.oracles) names.push_back(name);
  }
  json out = json::object();
  bool all_ok = true;
  std::string text;
  for (const auto& name : names) {
    const MatroidReport r = verify_matroid(m.oracle(name), a.max_size, g.max_subsets * 16);
    json list = json::array();
    for (const auto& v : r.violations)
      list.push_back({{"axiom", to_string(v.axiom)}, {"x", labels(m, v.x)}, {"y", labels(m, v.y)},
                      {"detail", v.detail}});
    out[name] = {{"ok", r.ok()}, {"pairs_checked", r.pairs_checked}, {"violations", list}};
    all_ok = all_ok && r.ok();
    text += (text.empty() ? "" : "\n") + name + ": " + (r.ok() ? "ok" : std::to_string(r.violations.size()) +
                                                                            " violations") +
            " (" + std::to_string(r.pairs_checked) + " pairs)";
  }
  if (names.empty()) text = "no oracles";
  return {{{"ok", all_ok}, {"oracles", out}}, text};
}

// ---------------------------------------------------------------------------
// torus

std::string matrix_text(const IntMatrix& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    out += i ? "\n" : "";
    for (int j = 0; j < m.cols(); ++j) out += (j ? " " : "") + m.at(i, j).get_str();
  }
  return out.empty() ? "(empty)" : out;
}

Report cmd_snf(const Args& a, const Globals&) {
  if (a.files.size() != 1) throw InputError("torus snf: expected one matrix file");
  const IntMatrix m = matrix_from_json(read_json(a.files[0]));
  const Snf s = snf(m);
  json inv = json::array();
  std::string text = "invariants:";
  for (const auto& d : s.invariants()) {
    inv.push_back(d.fits_slong_p() ? json(d.get_si()) : json(d.get_str()));
    text += " " + d.get_str();
  }
  text += "\nD:\n" + matrix_text(s.d) + "\nU:\n" + matrix_text(s.u) + "\nV:\n" + matrix_text(s.v);
  return {{{"d", to_json(s.d)}, {"invariants", inv}, {"rank", s.rank()}, {"u", to_json(s.u)}, {"v", to_json(s.v)}},
          text};
}

std::pair<LatticeCoset, LatticeCoset> two_cosets(const Args& a, const std::string& cmd) {
  if (a.files.size() != 2) throw InputError("torus " + cmd + ": expected two coset files");
  return {coset_from_json(read_json(a.files[0])), coset_from_json(read_json(a.files[1]))};
}

Report cmd_intersect(const Args& a, const Globals&) {
  const auto [w, s] = two_cosets(a, "intersect");
  const CosetIntersection x = intersect_cosets(w, s);
  const json comps = x.components.fits_slong_p() ? json(x.components.get_si()) : json(x.components.get_str());
  if (x.dim < 0) return {{{"components", 0}, {"dim", -1}}, "empty"};
  return {{{"components", comps}, {"dim", x.dim}},
          "dim " + std::to_string(x.dim) + ", " + x.components.get_str() + " components"};
}

Report cmd_typical(const Args& a, const Globals&) {
  const auto [w, s] = two_cosets(a, "typical");
  const Typicality t = typicality(w, s);
  if (t.empty) return {{{"empty", true}, {"expected", t.expected}}, "empty intersection"};
  return {{{"actual", t.actual}, {"atypical", t.atypical}, {"defect", t.defect}, {"expected", t.expected}},
          std::string(t.atypical ? "atypical" : "typical") + ": expected " + std::to_string(t.expected) +
              ", actual " + std::to_string(t.actual) + ", defect " + std::to_string(t.defect)};
}

std::vector<LatticeCoset> load_union(const std::string& path) {
  const json j = read_json(path);
  std::vector<LatticeCoset> out;
  const json* members = &j;
  if (j.is_object() && j.contains("members")) {
    for (const auto& [k, v] : j.items())
      if (k != "members") throw InputError(path + ": unknown key '" + k + "'");
    members = &j["members"];
  }
  if (members->is_object()) {
    out.push_back(coset_from_json(*members));
  } else if (members->is_array()) {
    for (const auto& c : *members) out.push_back(coset_from_json(c));
  } else {
    throw InputError(path + ": expected a coset, an array of cosets or {\"members\": [...]}");
  }
  if (out.empty()) throw InputError(path + ": no cosets");
  for (const auto& c : out)
    if (c.n() != out[0].n()) throw InputError(path + ": cosets live in different ambient dimensions");
  return out;
}

Report cmd_tau(const Args& a, const Globals& g) {
  if (a.files.size() != 1) throw InputError("torus tau: expected one coset file");
  if (a.bound < 0) throw InputError("--bound must be nonnegative");
  const auto w = load_union(a.files[0]);
  const int n = w[0].n();
  if (n == 0) throw InputError("torus tau: ambient dimension 0");
  const auto family = tau_family(w, n);
  const TauCheck ex = a.rows > 0 ? verify_tau_exhaustive(w, family, n, a.bound, a.rows) : TauCheck{};
  const TauCheck rnd = verify_tau_random(w, family, n, a.bound, a.samples, g.seed);
  json fam = json::array();
  for (const auto& f : family) fam.push_back(to_json(f));
  json uncovered = json::array();
  for (const auto* c : {&ex, &rnd})
    for (const auto& u : c->uncovered)
      uncovered.push_back({{"actual", u.report.actual},
                           {"expected", u.report.expected},
                           {"member", u.member},
                           {"subgroup", to_json(u.subgroup)}});
  const json out = {{"exhaustive", {{"atypical", ex.atypical}, {"subgroups", ex.subgroups}}},
                    {"family", fam},
                    {"n", n},
                    {"ok", uncovered.empty()},
                    {"random", {{"atypical", rnd.atypical}, {"subgroups", rnd.subgroups}}},
                    {"uncovered", uncovered}};
  std::ostringstream s;
  s << family.size() << " subtori; " << ex.subgroups + rnd.subgroups << " subgroups checked, "
    << ex.atypical + rnd.atypical << " atypical, " << uncovered.size() << " uncovered";
  for (const auto& f : family) s << "\n" << to_json(f).dump();
  return {out, s.str()};
}

}  // namespace

long timeout_ms(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string v;
    if (args[i] == "--timeout-ms" && i + 1 < args.size()) v = args[i + 1];
    else if (args[i].rfind("--timeout-ms=", 0) == 0) v = args[i].substr(13);
    else continue;
    try {
      return std::max(0L, std::stol(v));
    } catch (const std::exception&) {
      return 0;
    }
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predimension, amalgamation and torus intersection tools", "hrush"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  Args a;
  app.add_flag("--json", g.json, "JSON output with sorted keys");
  app.add_option("--seed", g.seed, "Seed for randomized choices");
  app.add_option("--max-points", g.max_points, "Largest structure accepted")->check(CLI::Range(1, kMaxPoints));
  app.add_option("--max-subsets", g.max_subsets, "Budget for exhaustive subset scans")
      ->check(CLI::PositiveNumber);
  app.add_option("--timeout-ms", g.timeout_ms, "Wall-clock limit in milliseconds (0: none)");

  std::function<Report()> action;
  auto command = [&](CLI::App* parent, const std::string& name, const std::string& help,
                     Report (*fn)(const Args&, const Globals&)) {
    CLI::App* c = parent->add_subcommand(name, help);
    c->callback([&action, &a, &g, fn] { action = [&a, &g, fn] { return fn(a, g); }; });
    return c;
  };
  auto structure = [&](CLI::App* c) {
    c->add_option("--structure", a.structure, "Structure file")->required();
    c->add_option("--spec", a.spec, "Predimension, e.g. trivial_r or field_f:d,f");
  };
  auto set = [&](CLI::App* c, bool required = true) {
    auto* o = c->add_option("--set", a.set, "Comma-separated point labels");
    if (required) o->required();
  };
  auto build = [&](CLI::App* c) {
    c->add_option("--spec", a.spec, "Predimension (default trivial_r)");
    c->add_option("--steps", a.steps, "Number of steps")->check(CLI::NonNegativeNumber);
    c->add_option("--cap", a.cap, "Size cap")->check(CLI::PositiveNumber);
    c->add_option("--level", a.level, "Richness level k")->check(CLI::NonNegativeNumber);
    c->add_option("--id-period", a.id_period, "Free point every n-th step (0: never)")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--template-cap", a.template_cap, "Extra template points beyond k")
        ->check(CLI::NonNegativeNumber);
    c->add_flag("--no-strong", a.no_strong, "Count realizations that are not strong");
    c->add_option("--out", a.out, "Write the trace here");
  };

  CLI::App* c = nullptr;
  c = command(&app, "delta", "delta(X)", cmd_delta);
  structure(c);
  set(c);
  c = command(&app, "delta-rel", "delta(X / A)", cmd_delta_rel);
  structure(c);
  set(c);
  c->add_option("--over", a.over, "Base A")->required();
  c = command(&app, "gs-check", "Check delta >= 0 on every subset", cmd_gs_check);
  structure(c);
  c = command(&app, "partial", "Derived dimension of X", cmd_partial);
  structure(c);
  set(c);
  c->add_option("--method", a.method, "auto, exhaustive or bb");
  c = command(&app, "strong", "Is X strong", cmd_strong);
  structure(c);
  set(c);
  c = command(&app, "closure", "Strong closure of X", cmd_closure);
  structure(c);
  set(c);
  c = command(&app, "embed-check", "Validate an embedding and test strongness", cmd_embed_check);
  c->add_option("--source", a.source, "Source structure")->required();
  c->add_option("--target", a.target, "Target structure")->required();
  c->add_option("--spec", a.spec, "Predimension");
  c->add_option("--map", a.map, "src=tgt pairs (default: by label)");
  c->add_flag("--exhaustive", a.exhaustive, "Compare d_partial on every subset");

  c = command(&app, "amalgamate", "Free amalgam of two extensions of a base (matched by label)", cmd_amalgamate);
  c->add_option("--base", a.base, "Base structure")->required();
  c->add_option("--left", a.left, "First extension")->required();
  c->add_option("--right", a.right, "Second extension")->required();
  c->add_option("--spec", a.spec, "Predimension");
  c->add_option("--out", a.out, "Write the amalgam here");
  c = command(&app, "templates", "Enumerate extension templates", cmd_templates);
  c->add_option("--spec", a.spec, "Predimension (default trivial_r)");
  c->add_option("--base-size", a.base_size, "Base size")->required()->check(CLI::NonNegativeNumber);
  c->add_option("--size", a.size, "Extension size")->required()->check(CLI::NonNegativeNumber);
  c->add_option("--lo", a.lo, "Least relative delta");
  c->add_option("--hi", a.hi, "Largest relative delta (default: new points)");
  c = command(&app, "richness", "Richness deficit at level k", cmd_richness);
  structure(c);
  c->add_option("--level", a.level, "Level k")->check(CLI::NonNegativeNumber);
  c->add_option("--template-cap", a.template_cap, "Extra template points beyond k")
      ->check(CLI::NonNegativeNumber);
  c->add_flag("--no-strong", a.no_strong, "Count realizations that are not strong");
  c = command(&app, "generic", "Generic build", cmd_generic);
  build(c);
  c = command(&app, "collapse", "Collapsed generic build", cmd_collapse);
  build(c);
  c->add_option("--mu", a.mu, "mu file")->required();
  c->add_option("--max-ext", a.max_ext, "Largest zero-minimal template checked")->check(CLI::PositiveNumber);
  c = command(&app, "mu-check", "mu-admissibility of a structure", cmd_mu_check);
  structure(c);
  c->add_option("--mu", a.mu, "mu file")->required();
  c->add_option("--max-ext", a.max_ext, "Largest zero-minimal template checked")->check(CLI::PositiveNumber);

  c = command(&app, "dim", "Dimension of a family of tuples", cmd_dim);
  structure(c);
  c->add_option("--tuples", a.tuples, "JSON array of label tuples")->required();
  c->add_option("--over", a.over, "Parameters");
  c = command(&app, "geom-closure", "Geometric closure of X", cmd_geom_closure);
  structure(c);
  set(c, false);
  c = command(&app, "pregeometry", "Check the closure laws exhaustively", cmd_pregeometry);
  structure(c);
  c->add_option("--max-domain", a.max_domain, "Largest domain checked")->check(CLI::PositiveNumber);
  c = command(&app, "matroid-verify", "Check rank axioms of oracles", cmd_matroid_verify);
  c->add_option("--structure", a.structure, "Structure file")->required();
  c->add_option("--oracle", a.oracle, "Oracle name (default: all)");
  c->add_option("--max-size", a.max_size, "Largest subset checked")->check(CLI::NonNegativeNumber);

  CLI::App* torus = app.add_subcommand("torus", "Lattices and torsion cosets");
  torus->require_subcommand(1);
  c = command(torus, "snf", "Smith normal form of a matrix file", cmd_snf);
  c->add_option("file", a.files, "Matrix JSON (array of rows)")->required();
  c = command(torus, "intersect", "Intersect two cosets", cmd_intersect);
  c->add_option("files", a.files, "Two coset files")->required()->expected(2);
  c = command(torus, "typical", "Typicality of an intersection", cmd_typical);
  c->add_option("files", a.files, "Two coset files")->required()->expected(2);
  c = command(torus, "tau", "Certificate family and covering check", cmd_tau);
  c->add_option("file", a.files, "Coset or union of cosets")->required();
  c->add_option("--bound", a.bound, "Subgroup generator entries in [-bound, bound]");
  c->add_option("--samples", a.samples, "Random subgroups");
  c->add_option("--rows", a.rows, "Exhaustive scan over up to this many generator rows (0: skip)")
      ->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << app.help();
    return 2;
  }

  try {
    const Report r = action();
    if (g.json) out << r.data.dump() << "\n";
    else out << r.text << "\n";
    return 0;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hrush::cli
