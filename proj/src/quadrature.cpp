#include "vergm/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "vergm/error.hpp"

namespace vergm {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Ratios b^{(r+1)}/b^{(r)} and b^{(r+2)}/b^{(r)}; together they give the slope
// and curvature of log b^{(r)}.
void log_derivs(int r, double x, double& d1, double& d2) {
  const double s = sigmoid(x);
  const double t = sigmoid(-x);  // 1 - s without cancellation
  switch (r) {
    case 0: {
      double ratio;  // sigma(x) / softplus(x)
      if (x < -30)
        ratio = 1.0 - 0.5 * std::exp(x);
      else
        ratio = s / softplus(x);
      d1 = ratio;
      d2 = ratio * t;
      return;
    }
    case 1:
      d1 = t;
      d2 = t * (t - s);
      return;
    case 2:
      d1 = t - s;
      d2 = 1.0 - 6.0 * s * t;
      return;
    default:
      throw ConfigError("unsupported derivative order " + std::to_string(r));
  }
}

}  // namespace

GaussHermite::GaussHermite(int order) {
  if (order < 1) throw ConfigError("Gauss-Hermite order must be positive");
  const auto count = static_cast<std::size_t>(order);
  nodes_.resize(count);
  weights_.resize(count);
  modified_.resize(count);

  // Golub-Welsch eigenvalues as starting points, then Newton on the
  // orthonormal Hermite recurrence. The recurrence also yields the weights in
  // the form 2 / H'(x)^2 with full relative accuracy, which the modified
  // weights w e^{x^2} need far out in the tails.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(k / 2.0);
  const Eigen::VectorXd start = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jac, Eigen::EigenvaluesOnly).eigenvalues();

  constexpr double kPiM4 = 0.7511255444649425;  // pi^{-1/4}
  for (int k = 0; k < order; ++k) {
    double x = start[k];
    double deriv = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = kPiM4, p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = x * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      deriv = std::sqrt(2.0 * order) * p2;
      const double dx = p1 / deriv;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    const auto d = static_cast<std::size_t>(k);
    nodes_[d] = x;
    const double log_w = std::log(2.0) - 2.0 * std::log(std::abs(deriv));
    weights_[d] = std::exp(log_w);
    modified_[d] = std::exp(log_w + x * x);
  }
  // Symmetrise so that x_d = -x_{D+1-d} exactly.
  for (int k = 0; k < order / 2; ++k) {
    const auto a = static_cast<std::size_t>(k), b = static_cast<std::size_t>(order - 1 - k);
    const double x = 0.5 * (nodes_[b] - nodes_[a]);
    nodes_[a] = -x;
    nodes_[b] = x;
    weights_[a] = weights_[b] = 0.5 * (weights_[a] + weights_[b]);
    modified_[a] = modified_[b] = 0.5 * (modified_[a] + modified_[b]);
  }
  if (order % 2 == 1) nodes_[count / 2] = 0.0;
}

double logistic_b(int r, double x) {
  const double s = sigmoid(x);
  const double t = sigmoid(-x);
  switch (r) {
    case 0:
      return softplus(x);
    case 1:
      return s;
    case 2:
      return s * t;
    case 3:
      return s * t * (t - s);
    case 4:
      return s * t * (1.0 - 6.0 * s * t);
    default:
      throw ConfigError("unsupported derivative order " + std::to_string(r));
  }
}

double b_moment(int r, double m, double v, const GaussHermite& quad) {
  if (r < 0 || r > 2) throw ConfigError("b_moment supports derivative orders 0, 1, 2; got " + std::to_string(r));
  if (!(v >= 0.0)) throw NumericalError("b_moment needs v >= 0");
  if (v == 0.0) return logistic_b(r, m);

  // log g(z) = log b^{(r)}(vz + m) - z^2/2 - log sqrt(2 pi) is strictly concave
  // with slope v * d1 - z, |d1| <= 1, so the mode lies in [-v, v].
  double lo = -v, hi = v;
  double z = 0.0;
  double d1 = 0.0, d2 = 0.0;
  for (int it = 0; it < 100; ++it) {
    log_derivs(r, v * z + m, d1, d2);
    const double slope = v * d1 - z;
    if (slope > 0)
      lo = z;
    else
      hi = z;
    const double curv = v * v * (d2 - d1 * d1) - 1.0;
    double next = z - slope / curv;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::abs(next - z) < 1e-14 * (1.0 + std::abs(z)) || hi - lo < 1e-15) {
      z = next;
      break;
    }
    z = next;
  }
  log_derivs(r, v * z + m, d1, d2);
  const double precision = 1.0 - v * v * (d2 - d1 * d1);
  const double scale = std::sqrt(2.0 / precision);  // sqrt(2) * v_hat

  const auto& x = quad.nodes();
  const auto& w = quad.modified_weights();
  double sum = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double zd = scale * x[d] + z;
    const double log_phi = -0.5 * zd * zd - kLogSqrt2Pi;
    sum += w[d] * logistic_b(r, v * zd + m) * std::exp(log_phi);
  }
  return scale * sum;
}

}  // namespace vergm
