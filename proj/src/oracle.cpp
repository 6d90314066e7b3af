#include "vergm/oracle.hpp"

#include <cmath>

#include "vergm/error.hpp"
#include "vergm/numeric.hpp"

namespace vergm {

ExactErgm::ExactErgm(const Network& nodes, const ModelSpec& spec) : n_(nodes.size()) {
  if (n_ > kMaxNodes)
    throw CapacityError("exact enumeration supports at most " + std::to_string(kMaxNodes) + " nodes, got " +
                        std::to_string(n_));
  spec.validate(nodes);
  const std::vector<Dyad> all = dyads(n_);
  const long count = 1L << all.size();
  Network g = nodes.empty_copy();
  StatEvaluator eval(spec, g);
  table_.resize(count, spec.dim());
  for (long code = 0; code < count; ++code) {
    for (std::size_t k = 0; k < all.size(); ++k) g.set_edge(all[k].i, all[k].j, (code >> k) & 1);
    table_.row(code) = eval.suff_stats(g).transpose();
  }
}

double ExactErgm::log_z(const Eigen::VectorXd& theta) const { return log_sum_exp(table_ * theta); }

Eigen::VectorXd ExactErgm::probabilities(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd lin = table_ * theta;
  return (lin.array() - log_sum_exp(lin)).exp();
}

OracleResult ExactErgm::at(const Eigen::VectorXd& theta) const {
  if (theta.size() != table_.cols()) throw ConfigError("theta length does not match model");
  OracleResult r;
  const Eigen::VectorXd lin = table_ * theta;
  r.log_z = log_sum_exp(lin);
  const Eigen::VectorXd w = (lin.array() - r.log_z).exp();
  r.mean = table_.transpose() * w;
  const Eigen::MatrixXd centered = table_.rowwise() - r.mean.transpose();
  r.cov = centered.transpose() * w.asDiagonal() * centered;
  r.cov = (0.5 * (r.cov + r.cov.transpose())).eval();
  return r;
}

double ExactErgm::log_lik(const Eigen::VectorXd& theta, const Eigen::VectorXd& s_obs) const {
  return theta.dot(s_obs) - log_z(theta);
}

Eigen::VectorXd ExactErgm::mle(const Eigen::VectorXd& s_obs) const {
  const auto p = table_.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  double f = log_lik(theta, s_obs);
  for (int it = 0; it < 200; ++it) {
    const OracleResult r = at(theta);
    const Eigen::VectorXd grad = s_obs - r.mean;
    if (grad.norm() <= 1e-11) return theta;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(r.cov);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14)
      throw NonConvergence("exact likelihood is flat in some direction; no finite MLE");
    const Eigen::VectorXd step = ldlt.solve(grad);
    double t = 1.0;
    Eigen::VectorXd next;
    double fn;
    do {
      next = theta + t * step;
      fn = log_lik(next, s_obs);
      t *= 0.5;
    } while (fn < f - 1e-14 && t > 1e-12);
    theta = next;
    f = fn;
    if (theta.cwiseAbs().maxCoeff() > 40.0) throw NonConvergence("exact MLE diverges; observed statistics on the boundary");
  }
  throw NonConvergence("exact MLE did not converge");
}

OracleResult enumerate_oracle(int n, const Eigen::VectorXd& theta, const ModelSpec& spec) {
  if (n > ExactErgm::kMaxNodes)
    throw CapacityError("exact enumeration supports at most " + std::to_string(ExactErgm::kMaxNodes) + " nodes");
  return ExactErgm(Network(n), spec).at(theta);
}

OracleResult enumerate_oracle(const Network& nodes, const Eigen::VectorXd& theta, const ModelSpec& spec) {
  return ExactErgm(nodes, spec).at(theta);
}

}  // namespace vergm
