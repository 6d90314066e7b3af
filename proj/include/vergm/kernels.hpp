#pragma once

// Hot loops, each in two flavours. `serial` is the plain reference used by the
// tests; `parallel` uses OpenMP. Parallel reductions sum fixed-size blocks in
// block order, so their results do not depend on the number of threads.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "vergm/gaussian.hpp"
#include "vergm/network.hpp"
#include "vergm/quadrature.hpp"
#include "vergm/sampler.hpp"
#include "vergm/stats.hpp"

namespace vergm::kernels {

inline constexpr Eigen::Index kDyadBlock = 128;

/// Per-dyad logistic terms eta_ij = alpha_ij + beta_ij^T theta.
struct DyadTerms {
  const Eigen::VectorXd& alpha;
  const Eigen::MatrixXd& beta;  // one row per dyad
  const Eigen::VectorXd& y;
};

/// Sums over dyads. For a point theta: lin = sum y eta, b0 = sum b(eta),
/// grad = sum (y - b'(eta)) beta, curv = sum b''(eta) beta beta^T.
/// Under q = N(mu, Sigma) the b-derivatives become B^(r)(m_ij, v_ij) and
/// lin uses m_ij.
struct DyadSums {
  double lin = 0.0;
  double b0 = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd curv;

  explicit DyadSums(int p = 0) : grad(Eigen::VectorXd::Zero(p)), curv(Eigen::MatrixXd::Zero(p, p)) {}
  void add(const DyadSums& o) {
    lin += o.lin;
    b0 += o.b0;
    grad += o.grad;
    curv += o.curv;
  }
};

/// log of the importance weight log p(y, theta) - log q(theta) numerator; must
/// be safe to call concurrently.
using LogJoint = std::function<double(const Eigen::VectorXd&)>;

/// Engine for IWLB replicate `row` in round `round`.
Engine iw_engine(std::uint64_t seed, long row, long round);

namespace serial {

StatSample simulate_chains(const Network& net0, const Eigen::VectorXd& theta, const ModelSpec& spec,
                           const SamplerConfig& cfg, Network* final_state);
DyadSums logpl_sums(const DyadTerms& d, const Eigen::VectorXd& theta);
/// lin - b0 only.
double logpl_value(const DyadTerms& d, const Eigen::VectorXd& theta);
DyadSums expected_sums(const DyadTerms& d, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                       const GaussHermite& quad);
/// log mean_k exp(S_k^T delta) for every column delta of `shifts`.
Eigen::VectorXd log_mean_exp_shifts(const Eigen::MatrixXd& stats, const Eigen::MatrixXd& shifts);
/// For each of log_sum.size() replicates draw J thetas from q and add the
/// importance weights into log_sum (log domain). Returns the number of
/// non-finite log weights, which contribute zero weight.
long iw_accumulate(const GaussianVariational& q, const LogJoint& log_joint, std::uint64_t seed, long round, int J,
                   Eigen::VectorXd& log_sum);

}  // namespace serial

namespace parallel {

StatSample simulate_chains(const Network& net0, const Eigen::VectorXd& theta, const ModelSpec& spec,
                           const SamplerConfig& cfg, Network* final_state);
DyadSums logpl_sums(const DyadTerms& d, const Eigen::VectorXd& theta);
double logpl_value(const DyadTerms& d, const Eigen::VectorXd& theta);
DyadSums expected_sums(const DyadTerms& d, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                       const GaussHermite& quad);
Eigen::VectorXd log_mean_exp_shifts(const Eigen::MatrixXd& stats, const Eigen::MatrixXd& shifts);
long iw_accumulate(const GaussianVariational& q, const LogJoint& log_joint, std::uint64_t seed, long round, int J,
                   Eigen::VectorXd& log_sum);

}  // namespace parallel

}  // namespace vergm::kernels
