#include "interval_set.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace scp {

IntervalSet::IntervalSet(std::initializer_list<Interval> intervals)
    : IntervalSet(std::vector<Interval>(intervals)) {}

IntervalSet::IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const Interval& iv : intervals_) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) {
      throw Error(ErrorKind::InvalidArgument, "interval_set", "interval with lo > hi or NaN endpoint");
    }
  }
  normalize();
}

void IntervalSet::normalize() {
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
  std::vector<Interval> merged;
  for (const Interval& iv : intervals_) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  intervals_ = std::move(merged);
}

bool IntervalSet::is_bounded() const {
  return intervals_.empty() || (std::isfinite(intervals_.front().lo) && std::isfinite(intervals_.back().hi));
}

bool IntervalSet::contains(double y) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), y,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->contains(y);
}

double IntervalSet::lebesgue_length() const {
  if (!is_bounded()) return kInfinity;
  double total = 0.0;
  for (const Interval& iv : intervals_) total += iv.length();
  return total;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < intervals_.size() && j < other.intervals_.size()) {
    const Interval& a = intervals_[i];
    const Interval& b = other.intervals_[j];
    const double lo = std::max(a.lo, b.lo);
    const double hi = std::min(a.hi, b.hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalSet(std::move(out));
}

bool IntervalSet::is_subset_of(const IntervalSet& other) const {
  return intersect(other) == *this;
}

}  // namespace scp
