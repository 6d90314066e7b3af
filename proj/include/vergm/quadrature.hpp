#pragma once

#include <vector>

namespace vergm {

/// Nodes and weights of D-point Gauss-Hermite quadrature for the weight
/// e^{-x^2}, plus the modified weights w_d e^{x_d^2} used after re-centring.
class GaussHermite {
 public:
  explicit GaussHermite(int order = 80);

  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& modified_weights() const { return modified_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> modified_;
};

/// b(x) = log(1 + e^x) and its derivatives, r = 0..4, evaluated stably.
double logistic_b(int r, double x);

/// E[b^{(r)}(m + vZ)], Z ~ N(0, 1), r in {0, 1, 2}. The integrand
/// b^{(r)}(vz + m) phi(z) is re-centred at its mode with the matching
/// curvature before applying the quadrature rule. v = 0 returns b^{(r)}(m).
double b_moment(int r, double m, double v, const GaussHermite& quad);

}  // namespace vergm
