#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace species {

/// A cardinality constraint: a normalized finite union of integer intervals.
/// Normal form: intervals sorted, disjoint and non-adjacent, each lo <= hi.
/// hi == kInf marks an unbounded interval.
class CardConstraint {
 public:
  static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

  struct Interval {
    std::uint64_t lo = 0;
    std::uint64_t hi = kInf;
    friend bool operator==(const Interval&, const Interval&) = default;
  };

  CardConstraint() = default;  // empty set of cardinalities

  static CardConstraint full() { return at_least(0); }
  static CardConstraint at_least(std::uint64_t k);
  static CardConstraint at_most(std::uint64_t k);
  static CardConstraint exactly(std::uint64_t k);
  static CardConstraint of(std::vector<Interval> raw);  // normalizes

  bool empty() const { return intervals_.empty(); }
  bool is_full() const;
  bool unbounded() const;  // some interval reaches infinity
  bool contains(std::uint64_t n) const;
  std::uint64_t min() const;  // smallest admissible cardinality; empty() must be false

  const std::vector<Interval>& intervals() const { return intervals_; }

  /// { n-1 : n in c, n >= 1 } -- the constraint of "one member removed".
  CardConstraint shifted_down() const;
  /// c with 0 removed.
  CardConstraint without_zero() const;
  /// c intersected with [k..inf).
  CardConstraint clamped_at_least(std::uint64_t k) const;

  friend bool operator==(const CardConstraint&, const CardConstraint&) = default;

 private:
  std::vector<Interval> intervals_;
};

std::string to_string(const CardConstraint& c);

}  // namespace species
