#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "vergm/kernels.hpp"
#include "vergm/network.hpp"
#include "vergm/sampler.hpp"
#include "vergm/stats.hpp"

namespace vergm {

/// log f_PL(y | theta) = sum_ij [y_ij eta_ij - b(eta_ij)], eta = X theta.
double log_pl(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& theta);

/// Logistic regression of y on the columns of X by Newton-Raphson with
/// step halving. Separation or rank deficiency raise NonConvergence naming the
/// column (`names[k]`).
Eigen::VectorXd logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                             double grad_tol = 1e-10);

/// Maximum pseudolikelihood estimate.
Eigen::VectorXd mple(const Network& net, const ModelSpec& spec);

struct McmleConfig {
  SamplerConfig sampler{30000, 1000, 1000, 1, 1};
  int max_rounds = 40;
  double tol = 1e-4;
  double trust_radius = 3.0;  // Mahalanobis radius of one recentring step
  int final_factor = 4;       // sample-size multiplier of the closing round
};

struct McmleResult {
  Eigen::VectorXd theta;
  int rounds = 0;
  bool converged = false;
};

/// Monte Carlo MLE by repeated recentring: simulate at theta0, maximise the
/// sampled log-likelihood ratio inside the trust region, move theta0 there.
/// Stops once the step is below `tol` or within the Monte Carlo noise of the
/// sample (Mahalanobis length^2 < 4p/K), then re-estimates from one last
/// sample `final_factor` times larger.
McmleResult mcmc_mle(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta0, const McmleConfig& cfg);

/// Maximiser of s_obs^T d - log mean_k exp(S_k^T d) subject to
/// d^T cov d <= radius^2.
Eigen::VectorXd maximize_log_ratio(const Eigen::MatrixXd& stats, const Eigen::VectorXd& s_obs,
                                   const Eigen::MatrixXd& cov, double radius);

/// W = R1^{-1} R2 where R1^T R1 = -Hessian of log f_PL at theta_pl and
/// R2^T R2 = cov_ml (upper Cholesky factors).
Eigen::MatrixXd curvature_adjust(const Eigen::MatrixXd& X, const Eigen::VectorXd& theta_pl,
                                 const Eigen::MatrixXd& cov_ml);

struct TemperSchedule {
  int J = 20;
  int K = 500;
  long aux_iters = 30000;  // burn-in on each rung
  long thin = 1000;
  bool modified = true;  // keep the edges coefficient fixed at theta_ML,1
  std::uint64_t seed = 1;

  /// t_0 = 0 < t_1 < ... < t_J = 1, equally spaced.
  std::vector<double> temps() const;
};

/// Thermodynamic importance-sampling estimate of log z(theta). The modified
/// schedule starts from the Bernoulli graph with the edges coefficient only;
/// the plain one starts from theta = 0, z(0) = 2^{n(n-1)/2}.
double log_z_tempered(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta,
                      const TemperSchedule& sched);

/// log M = theta_ml^T s(y) - log z(theta_ml) - log f_PL(y | theta_pl).
double magnitude_adjust(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta_ml,
                        const Eigen::VectorXd& theta_pl, double log_z_ml);

/// The adjusted pseudolikelihood f~(y|theta) = M f_PL(y | theta_pl + W(theta - theta_ml)),
/// stored per dyad as alpha_ij + beta_ij^T theta.
struct AdjustedPL {
  std::string spec;  // terms joined with ','
  std::uint64_t network_hash = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd theta_pl;
  Eigen::VectorXd theta_ml;
  Eigen::MatrixXd W;
  double log_M = 0.0;
  double log_z_ml = 0.0;
  Eigen::MatrixXd cov_ml;
  Eigen::VectorXd s_obs;
  Eigen::VectorXd y;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd beta;

  int dim() const { return static_cast<int>(theta_ml.size()); }
  kernels::DyadTerms terms() const { return {alpha, beta, y}; }
  /// g(theta) = theta_pl + W (theta - theta_ml)
  Eigen::VectorXd g(const Eigen::VectorXd& theta) const { return theta_pl + W * (theta - theta_ml); }
};

struct LogPLEval {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// log f~(y|theta) with gradient and Hessian.
LogPLEval adjusted_logpl(const AdjustedPL& apl, const Eigen::VectorXd& theta);

/// Builds an AdjustedPL from already estimated pieces.
AdjustedPL assemble_adjusted_pl(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta_pl,
                                const Eigen::VectorXd& theta_ml, const Eigen::MatrixXd& cov_ml, double log_z_ml);

struct AdjustConfig {
  McmleConfig mcmle;
  SamplerConfig cov_sampler{30000, 1000, 1000, 1, 1};
  TemperSchedule temper;
  std::uint64_t seed = 1;  // overrides the seeds of the three parts
};

/// MPLE, MCMC-MLE, cov_ml by simulation, tempered log z and the adjustment.
AdjustedPL build_adjusted_pl(const Network& net, const ModelSpec& spec, const AdjustConfig& cfg);

/// Same with exact MLE, covariance and log z from enumeration (n <= 5).
AdjustedPL build_adjusted_pl_exact(const Network& net, const ModelSpec& spec);

std::string spec_key(const ModelSpec& spec);

}  // namespace vergm
