#include "hrush/collapse.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>

namespace hrush {

namespace {

using json = nlohmann::json;

bool is_hash(const std::string& s) {
  return s.size() == 16 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

int read_bound(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1'000'000'000)
    throw InputError(path + ": bound must be an integer >= 1");
  return v.get<int>();
}

// Points sharing a triple with q.
std::vector<PointSet> neighbourhoods(const PreStructure& m) {
  std::vector<PointSet> nb(m.size());
  for (const auto& t : m.triples) {
    const PointSet s = triple_points(t);
    for (int i : s) nb[i] |= s;
  }
  for (int i = 0; i < m.size(); ++i) nb[i].erase(i);
  return nb;
}

// Connected point sets of at most `limit` points, each listed once.
std::vector<PointSet> connected_sets(const std::vector<PointSet>& nb, int limit) {
  std::set<std::uint64_t> seen;
  std::vector<PointSet> frontier, out;
  for (int i = 0; i < static_cast<int>(nb.size()); ++i) frontier.push_back(PointSet::single(i));
  while (!frontier.empty()) {
    std::vector<PointSet> next;
    for (PointSet s : frontier) {
      if (!seen.insert(s.bits()).second) continue;
      out.push_back(s);
      if (s.size() == limit) continue;
      PointSet around;
      for (int i : s) around |= nb[i];
      for (int j : around - s) next.push_back(s.with(j));
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](PointSet a, PointSet b) {
    return a.size() != b.size() ? a.size() < b.size() : a.bits() < b.bits();
  });
  return out;
}

ExtensionTemplate template_on(const PreStructure& m, PointSet base, PointSet fresh) {
  std::vector<int> pts = base.indices();
  for (int i : fresh) pts.push_back(i);
  std::vector<int> pos(m.size(), -1);
  for (std::size_t i = 0; i < pts.size(); ++i) pos[pts[i]] = static_cast<int>(i);
  ExtensionTemplate t;
  for (int i : pts) t.ext.points.push_back(m.points[i]);
  for (const auto& tr : m.triples)
    if (pos[tr[0]] >= 0 && pos[tr[1]] >= 0 && pos[tr[2]] >= 0) t.ext.triples.push_back({pos[tr[0]], pos[tr[1]], pos[tr[2]]});
  t.ext.normalize();
  t.base_size = base.size();
  t.rel_delta = fresh.size() - (static_cast<int>(t.ext.triples.size()) - triple_count(t.ext, PointSet::first(t.base_size)));
  return t;
}

}  // namespace

int MuFunction::bound(const ExtensionTemplate& t) const {
  const auto it = overrides.find(t.hash());
  return it == overrides.end() ? default_bound : it->second;
}

MuFunction mu_from_json(const json& j) {
  if (!j.is_object()) throw InputError("mu: expected an object");
  for (const auto& [k, v] : j.items())
    if (k != "default" && k != "overrides") throw InputError("mu: unknown key '" + k + "'");
  if (!j.contains("default")) throw InputError("mu: missing 'default'");
  MuFunction mu;
  mu.default_bound = read_bound(j["default"], "mu.default");
  if (j.contains("overrides")) {
    if (!j["overrides"].is_object()) throw InputError("mu.overrides: expected an object");
    for (const auto& [k, v] : j["overrides"].items()) {
      if (!is_hash(k)) throw InputError("mu.overrides: '" + k + "' is not a template hash");
      mu.overrides[k] = read_bound(v, "mu.overrides." + k);
    }
  }
  return mu;
}

json mu_to_json(const MuFunction& mu) {
  json o = json::object();
  for (const auto& [k, v] : mu.overrides) o[k] = v;
  return {{"default", mu.default_bound}, {"overrides", o}};
}

bool is_zero_minimal(const PredimensionSpec& spec, const ExtensionTemplate& t) {
  require_relational(spec);
  const PointSet base = PointSet::first(t.base_size), all = t.ext.all();
  const int base_delta = delta(spec, t.ext, base);
  if (delta(spec, t.ext, all) != base_delta) return false;
  bool ok = true;
  for_each_subset(all - base, [&](PointSet q) {
    if (!ok || q.empty() || q == all - base) return;
    if (delta(spec, t.ext, base | q) - base_delta <= 0) ok = false;
  });
  return ok;
}

int count_copies(const PredimensionSpec& spec, const PreStructure& m, const ExtensionTemplate& t,
                 const std::vector<int>& anchor) {
  const PointSet fresh = t.ext.all() - PointSet::first(t.base_size);
  std::vector<std::vector<int>> images;
  for (const Embedding& e : find_embeddings(spec, m, t, anchor)) images.push_back(e.image(fresh).indices());
  std::sort(images.begin(), images.end());
  images.erase(std::unique(images.begin(), images.end()), images.end());
  PointSet used;
  int count = 0;
  for (const auto& img : images) {
    if (std::any_of(img.begin(), img.end(), [&](int i) { return used.contains(i); })) continue;
    for (int i : img) used.insert(i);
    ++count;
  }
  return count;
}

MuReport mu_admissible(const PredimensionSpec& spec, const PreStructure& m, const MuFunction& mu, int max_ext) {
  require_relational(spec);
  if (max_ext < 1) throw InputError("mu template size bound must be positive");
  const auto nb = neighbourhoods(m);
  std::vector<PointSet> masks;
  for (const auto& t : m.triples) masks.push_back(triple_points(t));

  // (anchor, labeled form) -> template; each is counted once afterwards.
  std::map<std::pair<std::uint64_t, std::string>, ExtensionTemplate> found;
  for (PointSet fresh : connected_sets(nb, max_ext)) {
    PointSet support;
    for (PointSet t : masks)
      if (!(t & fresh).empty()) support |= t;
    support = support - fresh;
    const int room = max_ext - fresh.size();
    for (int size = 0; size <= std::min(room, support.size()); ++size) {
      for_each_subset_of_size(support, size, [&](PointSet base) {
        const PointSet ext = base | fresh;
        PointSet covered;
        int touching = 0;
        for (PointSet t : masks)
          if (t.subset_of(ext) && !(t & fresh).empty()) {
            covered |= t;
            ++touching;
          }
        if (!base.subset_of(covered) || touching != fresh.size()) return;
        ExtensionTemplate t = template_on(m, base, fresh);
        if (!is_zero_minimal(spec, t)) return;
        found.emplace(std::pair{base.bits(), t.labeled_form()}, std::move(t));
      });
    }
  }

  MuReport report;
  std::vector<std::pair<PointSet, const ExtensionTemplate*>> keys;
  for (const auto& [key, t] : found) keys.emplace_back(PointSet(key.first), &t);
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return a.first.size() != b.first.size() ? a.first.size() < b.first.size() : a.first.bits() < b.first.bits();
  });
  for (const auto& [anchor, t] : keys) {
    const int bound = mu.bound(*t);
    const int count = count_copies(spec, m, *t, anchor.indices());
    if (count > bound) report.violations.push_back({anchor, *t, count, bound});
  }
  return report;
}

BuildTrace collapse_build(const PredimensionSpec& spec, const MuFunction& mu, const BuildOptions& opts, int max_ext) {
  const BuildTrace generic = generic_build(spec, opts);
  BuildTrace out;
  out.spec = spec;
  out.options = opts;
  out.chain.emplace_back();
  for (std::size_t i = 0; i < generic.log.size(); ++i) {
    StepRecord rec = generic.log[i];
    const PreStructure& cur = out.chain.back();
    const PreStructure& g_next = generic.chain[i + 1];
    std::optional<PreStructure> next;
    bool base_present = true;
    for (const auto& l : rec.base)
      base_present = base_present && std::find(cur.points.begin(), cur.points.end(), l) != cur.points.end();
    if (base_present) {
      const PointSet base = cur.set_of(rec.base);
      const ExtensionTemplate t = template_on(g_next, g_next.set_of(rec.base), g_next.set_of(rec.new_points));
      PreStructure cand = realize(cur, base, t, rec.new_points);
      if (rec.action == StepRecord::Action::FreePoint || mu_admissible(spec, cand, mu, max_ext).ok())
        next = std::move(cand);
    }
    std::vector<int> id(cur.size());
    std::iota(id.begin(), id.end(), 0);
    out.embeddings.push_back(Embedding{id});
    rec.skipped = !next;
    out.log.push_back(std::move(rec));
    out.chain.push_back(next ? std::move(*next) : out.chain.back());
  }
  return out;
}

}  // namespace hrush
