#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "vergm/gaussian.hpp"
#include "vergm/network.hpp"
#include "vergm/pseudo.hpp"
#include "vergm/sampler.hpp"
#include "vergm/stats.hpp"

namespace vergm {

/// Gaussian at the mode of log f~(y|theta) + log p(theta) with covariance the
/// inverse negative Hessian there.
GaussianVariational laplace_fit(const AdjustedPL& apl, const GaussianPrior& prior);

struct ExchangeConfig {
  long iters = 11000;
  long burnin = 1000;
  double sigma_eps = 0.1;
  long aux_iters = 30000;  // tie-no-tie steps for each auxiliary network
  std::uint64_t seed = 1;
};

struct McmcChain {
  Eigen::MatrixXd draws;  // (iters - burnin) x p
  double acceptance_rate = 0.0;
  ExchangeConfig config;
};

/// Single-chain exchange algorithm with N(theta, sigma_eps^2 I) proposals.
/// Auxiliary networks are simulated starting from the observed network.
McmcChain exchange_sample(const Network& net, const ModelSpec& spec, const GaussianPrior& prior,
                          const Eigen::VectorXd& theta0, const ExchangeConfig& cfg);

/// A one-dimensional density: a kernel density estimate from draws, a normal,
/// or a tabulated density (linear interpolation, zero outside the table).
class Marginal {
 public:
  static Marginal from_samples(std::vector<double> xs);
  static Marginal gaussian(double mean, double sd);
  static Marginal tabulated(std::vector<double> grid, std::vector<double> density);

  double density(double x) const;
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double bandwidth() const { return h_; }

 private:
  enum class Kind { Kde, Gaussian, Table } kind_ = Kind::Gaussian;
  std::vector<double> xs_, ys_;
  double mean_ = 0.0, sd_ = 1.0, h_ = 0.0, lo_ = 0.0, hi_ = 0.0;
};

/// KL(a || b) on a 512-point grid over the union of both supports, with the
/// densities floored at 1e-12 and renormalised on the grid.
double marginal_kl(const Marginal& a, const Marginal& b);

/// Per-column KL between two draw matrices.
Eigen::VectorXd marginal_kl(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// Per-parameter KL of the marginals of q from columns of `draws`.
Eigen::VectorXd marginal_kl(const GaussianVariational& q, const Eigen::MatrixXd& draws);

}  // namespace vergm
