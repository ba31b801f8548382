#include "hrush/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hrush {

using nlohmann::json;

int PreStructure::index_of(std::string_view label) const {
  auto it = std::find(points.begin(), points.end(), label);
  if (it == points.end()) throw InputError("unknown point '" + std::string(label) + "'");
  return static_cast<int>(it - points.begin());
}

PointSet PreStructure::set_of(const std::vector<std::string>& labels) const {
  PointSet s;
  for (const auto& l : labels) s.insert(index_of(l));
  return s;
}

std::vector<std::string> PreStructure::labels_of(PointSet s) const {
  std::vector<std::string> out;
  for (int i : s) out.push_back(points.at(i));
  return out;
}

const std::vector<int>& PreStructure::function(const std::string& name) const {
  auto it = functions.find(name);
  if (it == functions.end()) throw InputError("unknown function '" + name + "'");
  return it->second;
}

const RankOracle& PreStructure::oracle(const std::string& name) const {
  auto it = oracles.find(name);
  if (it == oracles.end()) throw InputError("unknown oracle '" + name + "'");
  return it->second;
}

void PreStructure::normalize() {
  std::sort(triples.begin(), triples.end());
  triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
}

void validate(const PreStructure& m) {
  const int n = m.size();
  if (n > kMaxPoints) throw InputError("points: at most " + std::to_string(kMaxPoints) + " points supported");
  std::set<std::string> seen;
  for (int i = 0; i < n; ++i)
    if (!seen.insert(m.points[i]).second) throw InputError("points[" + std::to_string(i) + "]: duplicate label '" + m.points[i] + "'");
  for (std::size_t t = 0; t < m.triples.size(); ++t)
    for (int c = 0; c < 3; ++c)
      if (m.triples[t][c] < 0 || m.triples[t][c] >= n)
        throw InputError("triples[" + std::to_string(t) + "][" + std::to_string(c) + "]: dangling point reference");
  const PointSet dom = m.function_domain();
  for (const auto& [name, table] : m.functions) {
    if (static_cast<int>(table.size()) != n) throw InputError("functions." + name + ": table size mismatch");
    for (int i = 0; i < n; ++i) {
      const bool in_dom = dom.contains(i);
      if (in_dom && (table[i] < 0 || table[i] >= n))
        throw InputError("functions." + name + "." + m.points[i] + ": function not total on its domain");
      if (!in_dom && table[i] != -1)
        throw InputError("functions." + name + "." + m.points[i] + ": point outside the function domain");
    }
  }
  if (m.sorts) {
    const Sorts& s = *m.sorts;
    if ((s.d & s.a) != PointSet() || (s.d | s.a) != m.all())
      throw InputError("sorts: D and A must partition the points");
    if (static_cast<int>(s.bijection.size()) != n) throw InputError("sorts.bijection: table size mismatch");
    PointSet hit;
    for (int i = 0; i < n; ++i) {
      const int v = s.bijection[i];
      if (s.d.contains(i)) {
        if (v < 0) throw InputError("sorts.bijection." + m.points[i] + ": bijection not total on D");
        if (!s.a.contains(v)) throw InputError("sorts.bijection." + m.points[i] + ": image outside sort A");
        if (hit.contains(v)) throw InputError("sorts.bijection." + m.points[i] + ": bijection not injective");
        hit.insert(v);
      } else if (v != -1) {
        throw InputError("sorts.bijection." + m.points[i] + ": bijection defined outside D");
      }
    }
    if (hit != s.a) throw InputError("sorts.bijection: bijection not surjective onto A");
  }
  for (const auto& [name, o] : m.oracles)
    if (!o.ground().subset_of(m.all())) throw InputError("oracles." + name + ": ground leaves the point set");
}

int triple_count(const PreStructure& m, PointSet x) {
  int r = 0;
  for (const auto& t : m.triples)
    if (triple_points(t).subset_of(x)) ++r;
  return r;
}

PointSet image_closure(const PreStructure& m, PointSet x, const std::vector<std::string>& fnames) {
  if (!x.subset_of(m.all())) throw InputError("image_closure: unknown point");
  PointSet out = x;
  for (const auto& name : fnames) {
    const auto& table = m.function(name);
    for (int i : x)
      if (table[i] >= 0) out.insert(table[i]);
  }
  return out;
}

PreStructure induced(const PreStructure& m, PointSet x, std::vector<int>* old_to_new) {
  std::vector<int> relabel(m.size(), -1);
  PreStructure out;
  for (int i : x) {
    relabel[i] = out.size();
    out.points.push_back(m.points[i]);
  }
  for (const auto& t : m.triples)
    if (triple_points(t).subset_of(x)) out.triples.push_back({relabel[t[0]], relabel[t[1]], relabel[t[2]]});
  out.normalize();
  for (const auto& [name, table] : m.functions) {
    std::vector<int> nt(out.size(), -1);
    for (int i : x) {
      if (table[i] < 0) continue;
      if (!x.contains(table[i]))
        throw InputError("induced: function '" + name + "' leaves the subset at " + m.points[i]);
      nt[relabel[i]] = relabel[table[i]];
    }
    out.functions[name] = std::move(nt);
  }
  if (m.sorts) {
    Sorts s;
    s.bijection.assign(out.size(), -1);
    for (int i : x) {
      if (m.sorts->d.contains(i)) {
        s.d.insert(relabel[i]);
        const int v = m.sorts->bijection[i];
        if (!x.contains(v)) throw InputError("induced: bijection leaves the subset at " + m.points[i]);
        s.bijection[relabel[i]] = relabel[v];
      } else {
        s.a.insert(relabel[i]);
      }
    }
    out.sorts = std::move(s);
  }
  for (const auto& [name, o] : m.oracles) out.oracles.emplace(name, o.remapped(relabel));
  out.spec = m.spec;
  if (old_to_new) *old_to_new = std::move(relabel);
  return out;
}

std::string embedding_problem(const PreStructure& src, const PreStructure& tgt, const Embedding& e,
                              std::uint64_t oracle_subset_budget) {
  if (static_cast<int>(e.map.size()) != src.size()) return "map size differs from source size";
  PointSet img;
  for (int i = 0; i < src.size(); ++i) {
    const int v = e.map[i];
    if (v < 0 || v >= tgt.size()) return "image of " + src.points[i] + " is not a target point";
    if (img.contains(v)) return "map is not injective at " + src.points[i];
    img.insert(v);
  }
  std::set<Triple> mapped;
  for (const auto& t : src.triples) {
    Triple u{e.map[t[0]], e.map[t[1]], e.map[t[2]]};
    if (!std::binary_search(tgt.triples.begin(), tgt.triples.end(), u)) return "triple not preserved";
    mapped.insert(u);
  }
  for (const auto& t : tgt.triples)
    if (triple_points(t).subset_of(img) && !mapped.count(t)) return "target has an extra triple on the image";
  for (const auto& [name, table] : src.functions) {
    auto it = tgt.functions.find(name);
    if (it == tgt.functions.end()) return "target lacks function " + name;
    for (int i = 0; i < src.size(); ++i) {
      if (table[i] < 0) continue;
      if (it->second[e.map[i]] != e.map[table[i]]) return "function " + name + " does not commute at " + src.points[i];
    }
  }
  if (src.sorts) {
    if (!tgt.sorts) return "target is unsorted";
    for (int i = 0; i < src.size(); ++i) {
      if (src.sorts->d.contains(i) != tgt.sorts->d.contains(e.map[i])) return "sort not preserved at " + src.points[i];
      if (src.sorts->d.contains(i) && tgt.sorts->bijection[e.map[i]] != e.map[src.sorts->bijection[i]])
        return "bijection not preserved at " + src.points[i];
    }
  }
  for (const auto& [name, o] : src.oracles) {
    auto it = tgt.oracles.find(name);
    if (it == tgt.oracles.end()) return "target lacks oracle " + name;
    if (!e.image(o.ground()).subset_of(it->second.ground())) return "oracle " + name + " ground not preserved";
    const double subsets = std::ldexp(1.0, o.ground().size());
    if (subsets > static_cast<double>(oracle_subset_budget))
      throw BudgetExceeded("embedding check: oracle " + name + " needs " + std::to_string(subsets) + " subset checks", subsets);
    std::string bad;
    for_each_subset(o.ground(), [&](PointSet s) {
      if (bad.empty() && o.rank(s) != it->second.rank(e.image(s))) bad = "oracle " + name + " rank not preserved";
    });
    if (!bad.empty()) return bad;
  }
  return {};
}

Embedding embedding_by_label(const PreStructure& src, const PreStructure& tgt) {
  Embedding e;
  for (const auto& l : src.points) e.map.push_back(tgt.index_of(l));
  return e;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

std::string point_label(const json& v, const std::string& path) {
  if (!v.is_string()) throw InputError(path + ": expected a point label string");
  return v.get<std::string>();
}

int lookup(const std::map<std::string, int>& ids, const json& v, const std::string& path) {
  const std::string l = point_label(v, path);
  auto it = ids.find(l);
  if (it == ids.end()) throw InputError(path + ": dangling reference to undeclared point '" + l + "'");
  return it->second;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw InputError(path + ": unknown key '" + it.key() + "'");
  }
}

RankOracle oracle_from_json(const json& j, const std::map<std::string, int>& ids, int n, const std::string& path) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw InputError(path + ": missing oracle kind");
  const std::string kind = j["kind"];
  if (kind == "free") {
    reject_unknown_keys(j, {"kind"}, path);
    return RankOracle::free(PointSet::first(n));
  }
  if (kind == "uniform") {
    reject_unknown_keys(j, {"kind", "k"}, path);
    if (!j.contains("k") || !j["k"].is_number_integer()) throw InputError(path + ".k: expected an integer");
    return RankOracle::uniform(PointSet::first(n), j["k"].get<int>());
  }
  if (kind == "linear") {
    reject_unknown_keys(j, {"kind", "field", "vectors"}, path);
    if (!j.contains("field") || !j["field"].is_number_integer()) throw InputError(path + ".field: expected an integer");
    if (!j.contains("vectors") || !j["vectors"].is_object()) throw InputError(path + ".vectors: expected an object");
    std::map<int, std::vector<int>> vs;
    std::size_t len = 0;
    bool first = true;
    for (auto it = j["vectors"].begin(); it != j["vectors"].end(); ++it) {
      const std::string vp = path + ".vectors." + it.key();
      auto id = ids.find(it.key());
      if (id == ids.end()) throw InputError(vp + ": dangling reference to undeclared point '" + it.key() + "'");
      if (!it->is_array()) throw InputError(vp + ": expected an integer array");
      std::vector<int> v;
      for (const auto& c : *it) {
        if (!c.is_number_integer()) throw InputError(vp + ": expected an integer array");
        v.push_back(c.get<int>());
      }
      if (first) {
        len = v.size();
        first = false;
      } else if (v.size() != len) {
        throw InputError(vp + ": vectors must share one length");
      }
      vs[id->second] = std::move(v);
    }
    try {
      return RankOracle::linear(j["field"].get<int>(), std::move(vs));
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  throw InputError(path + ".kind: unknown oracle kind '" + kind + "'");
}

}  // namespace

nlohmann::json oracle_to_json(const PreStructure& m, const RankOracle& o) {
  json j;
  switch (o.kind()) {
    case OracleKind::Free:
      j["kind"] = "free";
      break;
    case OracleKind::Uniform:
      j["kind"] = "uniform";
      j["k"] = o.uniform_k();
      break;
    case OracleKind::Linear: {
      j["kind"] = "linear";
      j["field"] = o.field();
      json vs = json::object();
      for (int i : o.ground()) vs[m.points[i]] = o.vector_of(i);
      j["vectors"] = vs;
      break;
    }
  }
  return j;
}

json to_json(const PreStructure& m) {
  json j;
  j["points"] = m.points;
  json ts = json::array();
  for (const auto& t : m.triples) ts.push_back({m.points[t[0]], m.points[t[1]], m.points[t[2]]});
  j["triples"] = ts;
  if (!m.functions.empty()) {
    json fs = json::object();
    for (const auto& [name, table] : m.functions) {
      json f = json::object();
      for (int i = 0; i < m.size(); ++i)
        if (table[i] >= 0) f[m.points[i]] = m.points[table[i]];
      fs[name] = f;
    }
    j["functions"] = fs;
  }
  if (m.sorts) {
    json s;
    s["D"] = m.labels_of(m.sorts->d);
    s["A"] = m.labels_of(m.sorts->a);
    json b = json::object();
    for (int i : m.sorts->d) b[m.points[i]] = m.points[m.sorts->bijection[i]];
    s["bijection"] = b;
    j["sorts"] = s;
  }
  if (!m.oracles.empty()) {
    json os = json::object();
    for (const auto& [name, o] : m.oracles) os[name] = oracle_to_json(m, o);
    j["oracles"] = os;
  }
  if (m.spec) j["spec"] = *m.spec;
  return j;
}

PreStructure structure_from_json(const json& j) {
  reject_unknown_keys(j, {"points", "triples", "functions", "sorts", "oracles", "spec"}, "$");
  PreStructure m;
  if (!j.contains("points") || !j["points"].is_array()) throw InputError("points: expected an array");
  std::map<std::string, int> ids;
  for (std::size_t i = 0; i < j["points"].size(); ++i) {
    const std::string path = "points[" + std::to_string(i) + "]";
    std::string l = point_label(j["points"][i], path);
    if (!ids.emplace(l, static_cast<int>(i)).second) throw InputError(path + ": duplicate label '" + l + "'");
    m.points.push_back(std::move(l));
  }
  if (m.size() > kMaxPoints) throw InputError("points: at most " + std::to_string(kMaxPoints) + " points supported");
  const int n = m.size();

  if (j.contains("triples")) {
    const json& ts = j["triples"];
    if (!ts.is_array()) throw InputError("triples: expected an array");
    for (std::size_t t = 0; t < ts.size(); ++t) {
      const std::string path = "triples[" + std::to_string(t) + "]";
      if (!ts[t].is_array() || ts[t].size() != 3) throw InputError(path + ": expected three point labels");
      Triple tr;
      for (int c = 0; c < 3; ++c) tr[c] = lookup(ids, ts[t][c], path + "[" + std::to_string(c) + "]");
      m.triples.push_back(tr);
    }
    m.normalize();
  }

  if (j.contains("sorts")) {
    const json& s = j["sorts"];
    reject_unknown_keys(s, {"D", "A", "bijection"}, "sorts");
    Sorts sorts;
    sorts.bijection.assign(n, -1);
    for (const char* key : {"D", "A"}) {
      if (!s.contains(key) || !s[key].is_array()) throw InputError(std::string("sorts.") + key + ": expected an array");
      for (std::size_t i = 0; i < s[key].size(); ++i) {
        const int id = lookup(ids, s[key][i], std::string("sorts.") + key + "[" + std::to_string(i) + "]");
        (std::string(key) == "D" ? sorts.d : sorts.a).insert(id);
      }
    }
    if (!s.contains("bijection") || !s["bijection"].is_object()) throw InputError("sorts.bijection: expected an object");
    for (auto it = s["bijection"].begin(); it != s["bijection"].end(); ++it) {
      const std::string path = "sorts.bijection." + it.key();
      auto id = ids.find(it.key());
      if (id == ids.end()) throw InputError(path + ": dangling reference to undeclared point '" + it.key() + "'");
      sorts.bijection[id->second] = lookup(ids, *it, path);
    }
    m.sorts = std::move(sorts);
  }

  if (j.contains("functions")) {
    const json& fs = j["functions"];
    if (!fs.is_object()) throw InputError("functions: expected an object");
    const PointSet dom = m.function_domain();
    for (auto it = fs.begin(); it != fs.end(); ++it) {
      const std::string path = "functions." + it.key();
      if (!it->is_object()) throw InputError(path + ": expected an object");
      std::vector<int> table(n, -1);
      for (auto e = it->begin(); e != it->end(); ++e) {
        auto id = ids.find(e.key());
        if (id == ids.end()) throw InputError(path + "." + e.key() + ": dangling reference to undeclared point '" + e.key() + "'");
        if (!dom.contains(id->second)) throw InputError(path + "." + e.key() + ": point outside the function domain");
        table[id->second] = lookup(ids, *e, path + "." + e.key());
      }
      for (int i : dom)
        if (table[i] < 0) throw InputError(path + "." + m.points[i] + ": function not total on its domain");
      m.functions[it.key()] = std::move(table);
    }
  }

  if (j.contains("oracles")) {
    const json& os = j["oracles"];
    if (!os.is_object()) throw InputError("oracles: expected an object");
    for (auto it = os.begin(); it != os.end(); ++it)
      m.oracles.emplace(it.key(), oracle_from_json(*it, ids, n, "oracles." + it.key()));
  }

  if (j.contains("spec")) {
    if (!j["spec"].is_string()) throw InputError("spec: expected a string");
    m.spec = j["spec"].get<std::string>();
  }

  validate(m);
  return m;
}

PreStructure load_structure(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  return structure_from_json(j);
}

PreStructure load_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_structure(ss.str());
}

std::string serialize(const PreStructure& m) { return to_json(m).dump(2) + "\n"; }

}  // namespace hrush
