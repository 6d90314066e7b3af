#pragma once

#include <Eigen/Dense>

namespace vergm {

/// N(mu0, Sigma0) prior on theta.
class GaussianPrior {
 public:
  GaussianPrior() = default;
  GaussianPrior(Eigen::VectorXd mu0, Eigen::MatrixXd sigma0);
  /// N(0, variance * I).
  static GaussianPrior isotropic(int p, double variance = 100.0);

  int dim() const { return static_cast<int>(mu0_.size()); }
  const Eigen::VectorXd& mu0() const { return mu0_; }
  const Eigen::MatrixXd& sigma0() const { return sigma0_; }
  const Eigen::MatrixXd& precision() const { return precision_; }
  double log_det() const { return log_det_; }

  double log_density(const Eigen::VectorXd& theta) const;
  /// -Sigma0^{-1} (theta - mu0)
  Eigen::VectorXd grad_log_density(const Eigen::VectorXd& theta) const;

 private:
  Eigen::VectorXd mu0_;
  Eigen::MatrixXd sigma0_;
  Eigen::MatrixXd precision_;
  double log_det_ = 0.0;
};

/// q(theta) = N(mu, C C^T) with C lower triangular, positive diagonal.
struct GaussianVariational {
  Eigen::VectorXd mu;
  Eigen::MatrixXd C;

  GaussianVariational() = default;
  GaussianVariational(Eigen::VectorXd mu_, Eigen::MatrixXd C_);
  /// Gaussian with the given covariance (Cholesky factorised); throws NumericalError if not SPD.
  static GaussianVariational from_covariance(Eigen::VectorXd mu, const Eigen::MatrixXd& sigma);

  int dim() const { return static_cast<int>(mu.size()); }
  Eigen::MatrixXd sigma() const { return C * C.transpose(); }
  Eigen::VectorXd sd() const { return sigma().diagonal().cwiseSqrt(); }
  double log_det_C() const { return C.diagonal().array().log().sum(); }

  /// theta = C s + mu
  Eigen::VectorXd sample_theta(const Eigen::VectorXd& s) const { return C * s + mu; }
  /// s = C^{-1}(theta - mu)
  Eigen::VectorXd standardize(const Eigen::VectorXd& theta) const;

  double log_q(const Eigen::VectorXd& theta) const;
  /// d log q / d theta = -C^{-T} s
  Eigen::VectorXd grad_theta_log_q(const Eigen::VectorXd& theta) const;
  /// d log q / d vech(C) = vech(C^{-T}(s s^T - I)) at fixed theta.
  Eigen::VectorXd grad_vech_log_q(const Eigen::VectorXd& theta) const;
};

/// Column-major lower triangle, length p(p+1)/2.
Eigen::VectorXd vech(const Eigen::MatrixXd& A);
Eigen::MatrixXd unvech(const Eigen::VectorXd& v, int p);

/// C' equals C with its diagonal replaced by log diag(C).
Eigen::MatrixXd to_log_diag(const Eigen::MatrixXd& C);
Eigen::MatrixXd from_log_diag(const Eigen::MatrixXd& Cp);
/// Diagonal of D_C in vech order: C_ii at diagonal positions, 1 elsewhere,
/// so that grad_vech(C') = D_C grad_vech(C).
Eigen::VectorXd dc_diagonal(const Eigen::MatrixXd& C);

/// Single-draw ELBO estimate log p(y|theta) + log p(theta) - log q(theta),
/// with log q written through s: -log|C| - s^T s / 2 - (p/2) log 2 pi.
double elbo_at(const GaussianVariational& q, const Eigen::VectorXd& s, const Eigen::VectorXd& theta,
               double loglik, const GaussianPrior& prior);

}  // namespace vergm
