#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace vergm {

inline double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == 0) return -std::numeric_limits<double>::infinity();
  const double hi = x.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((x.array() - hi).exp().sum());
}

inline double log_mean_exp(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return log_sum_exp(x) - std::log(static_cast<double>(x.size()));
}

/// log(e^a + e^b) for possibly infinite arguments.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace vergm
