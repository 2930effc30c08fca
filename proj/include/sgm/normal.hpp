#pragma once

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

namespace sgm {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_quantile(double u) {
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, u);
}

}  // namespace sgm
