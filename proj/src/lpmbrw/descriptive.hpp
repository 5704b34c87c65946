#ifndef LPMBRW_DESCRIPTIVE_HPP
#define LPMBRW_DESCRIPTIVE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "error.hpp"

namespace lpmbrw {

/// Median of a copy of xs (mean of the two middle values for even sizes).
inline double median(std::span<const double> xs) {
  require(!xs.empty(), "median of an empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

inline double mean(std::span<const double> xs) {
  require(!xs.empty(), "mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double stddev(std::span<const double> xs) {
  require(xs.size() >= 2, "stddev needs at least two values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

inline double standard_error(std::span<const double> xs) {
  return stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace lpmbrw

#endif  // LPMBRW_DESCRIPTIVE_HPP
