#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirdiff/descriptor.hpp"

namespace dirdiff {

/// Open interval (lo, hi) of the real line.
struct Interval {
  double lo;
  double hi;

  double length() const noexcept { return hi - lo; }
  bool intersects(const Interval& o) const noexcept { return lo < o.hi && o.lo < hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// A finite collection of nonempty open intervals.
class IntervalCollection {
 public:
  IntervalCollection() = default;
  explicit IntervalCollection(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (const auto& i : intervals_) {
      if (!(i.lo < i.hi)) {
        throw std::invalid_argument("IntervalCollection: interval (" + format_real(i.lo) + ", " + format_real(i.hi) +
                                    ") is empty");
      }
    }
  }

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return intervals_.size(); }

 private:
  std::vector<Interval> intervals_;
};

/// Lebesgue measure of the union, by a sorted sweep.
inline double union_measure(const IntervalCollection& c) {
  std::vector<Interval> v = c.intervals();
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double total = 0.0;
  bool open = false;
  double run_lo = 0.0, run_hi = 0.0;
  for (const auto& i : v) {
    if (open && i.lo < run_hi) {
      run_hi = std::max(run_hi, i.hi);
      continue;
    }
    if (open) total += run_hi - run_lo;
    run_lo = i.lo;
    run_hi = i.hi;
    open = true;
  }
  if (open) total += run_hi - run_lo;
  return total;
}

/// Greedy Vitali selection: take the longest remaining interval (ties go to
/// the leftmost), drop everything meeting it, repeat. The result is pairwise
/// disjoint with total length >= m(U)/3 > c/3.
inline std::vector<Interval> greedy_cover_select(const IntervalCollection& c, double threshold) {
  const double covered = union_measure(c);
  if (!(threshold < covered)) {
    throw std::invalid_argument("greedy_cover_select: need c < m(U), got c = " + format_real(threshold) +
                                " and m(U) = " + format_real(covered));
  }
  std::vector<Interval> order = c.intervals();
  std::stable_sort(order.begin(), order.end(), [](const Interval& a, const Interval& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    return a.lo < b.lo;
  });
  std::vector<Interval> chosen;
  for (const auto& i : order) {
    const bool free = std::none_of(chosen.begin(), chosen.end(), [&](const Interval& s) { return s.intersects(i); });
    if (free) chosen.push_back(i);
  }
  return chosen;
}

inline double total_length(const std::vector<Interval>& v) {
  double t = 0.0;
  for (const auto& i : v) t += i.length();
  return t;
}

}  // namespace dirdiff
