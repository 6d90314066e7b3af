#include "vergm/gaussian.hpp"

#include <cmath>

#include "vergm/error.hpp"

namespace vergm {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

GaussianPrior::GaussianPrior(Eigen::VectorXd mu0, Eigen::MatrixXd sigma0)
    : mu0_(std::move(mu0)), sigma0_(std::move(sigma0)) {
  if (sigma0_.rows() != mu0_.size() || sigma0_.cols() != mu0_.size())
    throw ConfigError("prior covariance does not match prior mean");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma0_);
  if (llt.info() != Eigen::Success) throw NumericalError("prior covariance is not positive definite");
  precision_ = llt.solve(Eigen::MatrixXd::Identity(mu0_.size(), mu0_.size()));
  log_det_ = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

GaussianPrior GaussianPrior::isotropic(int p, double variance) {
  if (!(variance > 0.0)) throw ConfigError("prior variance must be positive");
  return GaussianPrior(Eigen::VectorXd::Zero(p), variance * Eigen::MatrixXd::Identity(p, p));
}

double GaussianPrior::log_density(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd d = theta - mu0_;
  return -0.5 * (dim() * kLog2Pi + log_det_ + d.dot(precision_ * d));
}

Eigen::VectorXd GaussianPrior::grad_log_density(const Eigen::VectorXd& theta) const {
  return -precision_ * (theta - mu0_);
}

GaussianVariational::GaussianVariational(Eigen::VectorXd mu_, Eigen::MatrixXd C_) : mu(std::move(mu_)), C(std::move(C_)) {
  if (C.rows() != mu.size() || C.cols() != mu.size()) throw ConfigError("C does not match mu");
  C = C.triangularView<Eigen::Lower>();
  if ((C.diagonal().array() <= 0.0).any()) throw NumericalError("C must have a positive diagonal");
}

GaussianVariational GaussianVariational::from_covariance(Eigen::VectorXd mu, const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (sigma + sigma.transpose()));
  if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
  return GaussianVariational(std::move(mu), llt.matrixL());
}

Eigen::VectorXd GaussianVariational::standardize(const Eigen::VectorXd& theta) const {
  return C.triangularView<Eigen::Lower>().solve(theta - mu);
}

double GaussianVariational::log_q(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd s = standardize(theta);
  return -0.5 * dim() * kLog2Pi - log_det_C() - 0.5 * s.squaredNorm();
}

Eigen::VectorXd GaussianVariational::grad_theta_log_q(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd s = standardize(theta);
  return -C.triangularView<Eigen::Lower>().transpose().solve(s);
}

Eigen::VectorXd GaussianVariational::grad_vech_log_q(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd s = standardize(theta);
  const int p = dim();
  const Eigen::MatrixXd inner = s * s.transpose() - Eigen::MatrixXd::Identity(p, p);
  const Eigen::MatrixXd g = C.triangularView<Eigen::Lower>().transpose().solve(inner);
  return vech(g);
}

Eigen::VectorXd vech(const Eigen::MatrixXd& A) {
  const auto p = A.rows();
  Eigen::VectorXd v(p * (p + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j; i < p; ++i) v[k++] = A(i, j);
  return v;
}

Eigen::MatrixXd unvech(const Eigen::VectorXd& v, int p) {
  if (v.size() != static_cast<Eigen::Index>(p) * (p + 1) / 2) throw ConfigError("vech length does not match dimension");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  Eigen::Index k = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) A(i, j) = v[k++];
  return A;
}

Eigen::MatrixXd to_log_diag(const Eigen::MatrixXd& C) {
  Eigen::MatrixXd Cp = C;
  Cp.diagonal() = C.diagonal().array().log().matrix();
  return Cp;
}

Eigen::MatrixXd from_log_diag(const Eigen::MatrixXd& Cp) {
  Eigen::MatrixXd C = Cp;
  C.diagonal() = Cp.diagonal().array().exp().matrix();
  return C;
}

Eigen::VectorXd dc_diagonal(const Eigen::MatrixXd& C) {
  const auto p = C.rows();
  Eigen::VectorXd d(p * (p + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = j; i < p; ++i) d[k++] = (i == j) ? C(i, i) : 1.0;
  return d;
}

double elbo_at(const GaussianVariational& q, const Eigen::VectorXd& s, const Eigen::VectorXd& theta, double loglik,
               const GaussianPrior& prior) {
  return loglik + prior.log_density(theta) + q.log_det_C() + 0.5 * s.squaredNorm() + 0.5 * q.dim() * kLog2Pi;
}

}  // namespace vergm
