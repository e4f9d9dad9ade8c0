#pragma once

#include <initializer_list>
#include <limits>
#include <vector>

namespace scp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Closed interval [lo, hi] on the extended real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double y) const { return lo <= y && y <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Finite union of closed intervals, kept sorted and pairwise disjoint.
// Touching intervals are coalesced; single points are kept.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> intervals);
  explicit IntervalSet(std::vector<Interval> intervals);

  static IntervalSet real_line() { return IntervalSet{{-kInfinity, kInfinity}}; }
  static IntervalSet empty() { return {}; }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool is_empty() const { return intervals_.empty(); }
  bool is_bounded() const;
  bool contains(double y) const;

  // Lebesgue measure; +inf as soon as one endpoint is infinite.
  double lebesgue_length() const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  bool is_subset_of(const IntervalSet& other) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  void normalize();

  std::vector<Interval> intervals_;
};

}  // namespace scp
