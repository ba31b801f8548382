#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrush {

// Malformed or inconsistent input: bad files, unknown names, dangling ids.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An exhaustive search would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
public:
  BudgetExceeded(const std::string& what, double required)
      : std::runtime_error(what), required_(required) {}
  double required() const { return required_; }

private:
  double required_;
};

// An internal invariant failed (e.g. a closure that should be unique is not).
class ConsistencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPoints = 64;

// A finite set of point indices, stored as a bitmask. Structures carry at
// most kMaxPoints points.
class PointSet {
public:
  constexpr PointSet() = default;
  constexpr explicit PointSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr PointSet single(int i) { return PointSet(std::uint64_t{1} << i); }
  static constexpr PointSet first(int n) {
    return PointSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static PointSet of(std::initializer_list<int> ids) {
    PointSet s;
    for (int i : ids) s.insert(i);
    return s;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(int i) const { return (bits_ >> i) & 1U; }
  constexpr bool subset_of(PointSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr int lowest() const { return std::countr_zero(bits_); }

  constexpr void insert(int i) { bits_ |= std::uint64_t{1} << i; }
  constexpr void erase(int i) { bits_ &= ~(std::uint64_t{1} << i); }

  constexpr PointSet with(int i) const { return PointSet(bits_ | (std::uint64_t{1} << i)); }
  constexpr PointSet without(int i) const { return PointSet(bits_ & ~(std::uint64_t{1} << i)); }

  friend constexpr PointSet operator|(PointSet a, PointSet b) { return PointSet(a.bits_ | b.bits_); }
  friend constexpr PointSet operator&(PointSet a, PointSet b) { return PointSet(a.bits_ & b.bits_); }
  friend constexpr PointSet operator-(PointSet a, PointSet b) { return PointSet(a.bits_ & ~b.bits_); }
  constexpr PointSet& operator|=(PointSet o) { bits_ |= o.bits_; return *this; }
  constexpr PointSet& operator&=(PointSet o) { bits_ &= o.bits_; return *this; }
  friend constexpr bool operator==(PointSet, PointSet) = default;
  friend constexpr auto operator<=>(PointSet, PointSet) = default;

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::uint64_t b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  // Iteration over member indices in increasing order.
  class iterator {
  public:
    constexpr explicit iterator(std::uint64_t b) : b_(b) {}
    constexpr int operator*() const { return std::countr_zero(b_); }
    constexpr iterator& operator++() { b_ &= b_ - 1; return *this; }
    constexpr bool operator!=(const iterator& o) const { return b_ != o.b_; }

  private:
    std::uint64_t b_;
  };
  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

private:
  std::uint64_t bits_ = 0;
};

// Visits every subset of `universe` (including the empty set and universe).
template <typename F>
void for_each_subset(PointSet universe, F&& f) {
  const std::uint64_t u = universe.bits();
  std::uint64_t s = 0;
  while (true) {
    f(PointSet(s));
    if (s == u) break;
    s = (s - u) & u;
  }
}

}  // namespace hrush
