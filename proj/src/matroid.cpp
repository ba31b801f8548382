#include "hrush/matroid.hpp"

#include <algorithm>
#include <utility>

namespace hrush {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

namespace {

int mod(int a, int p) {
  int r = a % p;
  return r < 0 ? r + p : r;
}

int inverse_mod(int a, int p) {
  // p is prime and small: Fermat.
  int result = 1, base = mod(a, p), e = p - 2;
  while (e > 0) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return result;
}

}  // namespace

int gf_rank(std::vector<std::vector<int>> rows, int p) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  for (auto& r : rows)
    for (auto& v : r) v = mod(v, p);
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    auto pivot = std::find_if(rows.begin() + rank, rows.end(), [&](const auto& r) { return r[c] != 0; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, pivot);
    auto& pr = rows[rank];
    const int inv = inverse_mod(pr[c], p);
    for (auto& v : pr) v = v * inv % p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(i) == rank || rows[i][c] == 0) continue;
      const int f = rows[i][c];
      for (std::size_t j = c; j < cols; ++j) rows[i][j] = mod(rows[i][j] - f * pr[j], p);
    }
    ++rank;
  }
  return rank;
}

RankOracle RankOracle::free(PointSet ground) {
  RankOracle o;
  o.kind_ = OracleKind::Free;
  o.ground_ = ground;
  return o;
}

RankOracle RankOracle::uniform(PointSet ground, int k) {
  if (k < 0) throw InputError("uniform oracle: k must be non-negative");
  RankOracle o;
  o.kind_ = OracleKind::Uniform;
  o.ground_ = ground;
  o.k_ = k;
  return o;
}

RankOracle RankOracle::linear(int p, std::map<int, std::vector<int>> vectors) {
  if (!is_prime(p) || p > 97) throw InputError("linear oracle: field must be a prime <= 97, got " + std::to_string(p));
  RankOracle o;
  o.kind_ = OracleKind::Linear;
  o.p_ = p;
  o.vectors_.assign(kMaxPoints, {});
  bool first = true;
  for (auto& [pt, v] : vectors) {
    if (pt < 0 || pt >= kMaxPoints) throw InputError("linear oracle: point index out of range");
    if (first) {
      o.dim_ = static_cast<int>(v.size());
      first = false;
    } else if (static_cast<int>(v.size()) != o.dim_) {
      throw InputError("linear oracle: vectors must share one length");
    }
    for (auto& c : v) c = mod(c, p);
    o.ground_.insert(pt);
    o.vectors_[pt] = std::move(v);
  }
  return o;
}

const std::vector<int>& RankOracle::vector_of(int point) const {
  static const std::vector<int> none;
  if (kind_ != OracleKind::Linear || !ground_.contains(point)) return none;
  return vectors_[point];
}

int RankOracle::rank(PointSet x) const {
  if (!x.subset_of(ground_)) throw InputError("rank: point set leaves the oracle's ground set");
  switch (kind_) {
    case OracleKind::Free:
      return x.size();
    case OracleKind::Uniform:
      return std::min(x.size(), k_);
    case OracleKind::Linear: {
      std::vector<std::vector<int>> rows;
      rows.reserve(x.size());
      for (int i : x) rows.push_back(vectors_[i]);
      return gf_rank(std::move(rows), p_);
    }
  }
  return 0;
}

RankOracle RankOracle::remapped(const std::vector<int>& relabel) const {
  PointSet g;
  for (int i : ground_)
    if (i < static_cast<int>(relabel.size()) && relabel[i] >= 0) g.insert(relabel[i]);
  switch (kind_) {
    case OracleKind::Free:
      return free(g);
    case OracleKind::Uniform:
      return uniform(g, k_);
    case OracleKind::Linear: {
      std::map<int, std::vector<int>> vs;
      for (int i : ground_)
        if (i < static_cast<int>(relabel.size()) && relabel[i] >= 0) vs[relabel[i]] = vectors_[i];
      RankOracle o = linear(p_, std::move(vs));
      o.dim_ = dim_;
      return o;
    }
  }
  return *this;
}

std::string to_string(MatroidViolation::Axiom a) {
  switch (a) {
    case MatroidViolation::Axiom::Bounds: return "bounds";
    case MatroidViolation::Axiom::Monotone: return "monotone";
    case MatroidViolation::Axiom::Submodular: return "submodular";
  }
  return "?";
}

MatroidReport verify_matroid(PointSet ground, const RankFn& rank, int max_subset_size,
                             std::uint64_t pair_budget) {
  std::vector<PointSet> subsets;
  for_each_subset(ground, [&](PointSet s) {
    if (s.size() <= max_subset_size) subsets.push_back(s);
  });
  const double pairs = static_cast<double>(subsets.size()) * static_cast<double>(subsets.size());
  if (pairs > static_cast<double>(pair_budget))
    throw BudgetExceeded("verify_matroid: " + std::to_string(static_cast<std::uint64_t>(pairs)) +
                             " pair checks exceed budget " + std::to_string(pair_budget),
                         pairs);

  // Ranks are read once per subset; the rank function is consulted in
  // canonical subset order so a stateful test double is reproducible.
  std::map<std::uint64_t, int> r;
  MatroidReport report;
  for (PointSet s : subsets) {
    const int v = rank(s);
    r[s.bits()] = v;
    if (v < 0 || v > s.size())
      report.violations.push_back({MatroidViolation::Axiom::Bounds, s, s,
                                   "rank " + std::to_string(v) + " outside [0," + std::to_string(s.size()) + "]"});
  }
  auto rank_of = [&](PointSet s) {
    auto it = r.find(s.bits());
    return it != r.end() ? it->second : rank(s);
  };
  for (PointSet x : subsets) {
    for (PointSet y : subsets) {
      ++report.pairs_checked;
      const int rx = r[x.bits()], ry = r[y.bits()];
      if (x.subset_of(y) && rx > ry)
        report.violations.push_back({MatroidViolation::Axiom::Monotone, x, y,
                                     std::to_string(rx) + " > " + std::to_string(ry)});
      if (x.bits() < y.bits()) {
        const PointSet u = x | y;
        if (u.size() > max_subset_size) continue;
        const int lhs = rank_of(u) + rank_of(x & y);
        if (lhs > rx + ry)
          report.violations.push_back({MatroidViolation::Axiom::Submodular, x, y,
                                       std::to_string(lhs) + " > " + std::to_string(rx + ry)});
      }
    }
  }
  return report;
}

MatroidReport verify_matroid(const RankOracle& oracle, int max_subset_size, std::uint64_t pair_budget) {
  return verify_matroid(oracle.ground(), [&](PointSet s) { return oracle.rank(s); }, max_subset_size,
                        pair_budget);
}

}  // namespace hrush
