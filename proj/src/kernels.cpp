#include "vergm/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "vergm/numeric.hpp"

namespace vergm::kernels {

Engine iw_engine(std::uint64_t seed, long row, long round) {
  return Engine(derive_seed(derive_seed(seed, "iwlb", static_cast<std::uint64_t>(row)), "round",
                            static_cast<std::uint64_t>(round)));
}

namespace {

int chain_count(const SamplerConfig& cfg, int c) {
  return cfg.count / cfg.chains + (c < cfg.count % cfg.chains ? 1 : 0);
}

int chain_offset(const SamplerConfig& cfg, int c) {
  int off = 0;
  for (int k = 0; k < c; ++k) off += chain_count(cfg, k);
  return off;
}

void run_chain(const Network& net0, const Eigen::VectorXd& theta, const ModelSpec& spec, const SamplerConfig& cfg,
               int c, Eigen::MatrixXd& out, Network* final_state) {
  TntChain chain(net0, spec, derive_seed(cfg.seed, "tnt", static_cast<std::uint64_t>(c)));
  const int rows = chain_count(cfg, c);
  const int off = chain_offset(cfg, c);
  chain.run(theta, cfg.aux_iters);
  for (int k = 0; k < rows; ++k) {
    if (k > 0) chain.run(theta, cfg.thin);
    out.row(off + k) = chain.stats().transpose();
  }
  if (final_state) *final_state = chain.state();
}

// curv += w beta^T beta, mirrored so the sum stays exactly symmetric.
void add_outer(Eigen::MatrixXd& curv, double w, const Eigen::Ref<const Eigen::RowVectorXd>& beta) {
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = w * beta[i] * beta[j];
      curv(i, j) += v;
      if (j != i) curv(j, i) += v;
    }
}

void point_term(const DyadTerms& d, Eigen::Index k, const Eigen::VectorXd& theta, DyadSums& acc) {
  const auto beta = d.beta.row(k);
  const double eta = d.alpha[k] + beta.dot(theta);
  const double yk = d.y[k];
  acc.lin += yk * eta;
  acc.b0 += logistic_b(0, eta);
  acc.grad.noalias() += (yk - logistic_b(1, eta)) * beta.transpose();
  add_outer(acc.curv, logistic_b(2, eta), beta);
}

void expected_term(const DyadTerms& d, Eigen::Index k, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                   const GaussHermite& quad, DyadSums& acc) {
  const auto beta = d.beta.row(k);
  const double m = d.alpha[k] + beta.dot(mu);
  const double v = std::sqrt(std::max(0.0, beta.dot(sigma * beta.transpose())));
  const double yk = d.y[k];
  acc.lin += yk * m;
  acc.b0 += b_moment(0, m, v, quad);
  acc.grad.noalias() += (yk - b_moment(1, m, v, quad)) * beta.transpose();
  add_outer(acc.curv, b_moment(2, m, v, quad), beta);
}

template <class Term>
DyadSums blocked_sum(const DyadTerms& d, Term term) {
  const Eigen::Index n = d.alpha.size();
  const int p = static_cast<int>(d.beta.cols());
  const Eigen::Index blocks = (n + kDyadBlock - 1) / kDyadBlock;
  std::vector<DyadSums> parts(static_cast<std::size_t>(blocks), DyadSums(p));
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index end = std::min(n, (b + 1) * kDyadBlock);
    for (Eigen::Index k = b * kDyadBlock; k < end; ++k) term(k, parts[static_cast<std::size_t>(b)]);
  }
  DyadSums total(p);
  for (const DyadSums& part : parts) total.add(part);
  return total;
}

double shifted_log_mean_exp(const Eigen::MatrixXd& stats, const Eigen::VectorXd& delta) {
  return log_mean_exp(stats * delta);
}

long iw_row(const GaussianVariational& q, const LogJoint& log_joint, std::uint64_t seed, long round, int J, long row,
            double& log_sum) {
  Engine eng = iw_engine(seed, row, round);
  const int p = q.dim();
  Eigen::VectorXd s(p);
  long bad = 0;
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < p; ++k) s[k] = standard_normal(eng);
    const Eigen::VectorXd theta = q.sample_theta(s);
    const double log_q = -0.5 * p * 1.8378770664093454836 - q.log_det_C() - 0.5 * s.squaredNorm();
    const double lw = log_joint(theta) - log_q;
    if (!std::isfinite(lw)) {
      ++bad;
      continue;
    }
    log_sum = log_add(log_sum, lw);
  }
  return bad;
}

}  // namespace

namespace serial {

StatSample simulate_chains(const Network& net0, const Eigen::VectorXd& theta, const ModelSpec& spec,
                           const SamplerConfig& cfg, Network* final_state) {
  StatSample out{Eigen::MatrixXd(cfg.count, spec.dim()), theta};
  for (int c = 0; c < cfg.chains; ++c) run_chain(net0, theta, spec, cfg, c, out.stats, c == 0 ? final_state : nullptr);
  return out;
}

DyadSums logpl_sums(const DyadTerms& d, const Eigen::VectorXd& theta) {
  DyadSums acc(static_cast<int>(theta.size()));
  for (Eigen::Index k = 0; k < d.alpha.size(); ++k) point_term(d, k, theta, acc);
  return acc;
}

double logpl_value(const DyadTerms& d, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = d.alpha + d.beta * theta;
  double s = 0.0;
  for (Eigen::Index k = 0; k < eta.size(); ++k) s += d.y[k] * eta[k] - logistic_b(0, eta[k]);
  return s;
}

DyadSums expected_sums(const DyadTerms& d, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                       const GaussHermite& quad) {
  DyadSums acc(static_cast<int>(mu.size()));
  for (Eigen::Index k = 0; k < d.alpha.size(); ++k) expected_term(d, k, mu, sigma, quad, acc);
  return acc;
}

Eigen::VectorXd log_mean_exp_shifts(const Eigen::MatrixXd& stats, const Eigen::MatrixXd& shifts) {
  Eigen::VectorXd out(shifts.cols());
  for (Eigen::Index c = 0; c < shifts.cols(); ++c) out[c] = shifted_log_mean_exp(stats, shifts.col(c));
  return out;
}

long iw_accumulate(const GaussianVariational& q, const LogJoint& log_joint, std::uint64_t seed, long round, int J,
                   Eigen::VectorXd& log_sum) {
  long bad = 0;
  for (Eigen::Index i = 0; i < log_sum.size(); ++i) bad += iw_row(q, log_joint, seed, round, J, i, log_sum[i]);
  return bad;
}

}  // namespace serial

namespace parallel {

StatSample simulate_chains(const Network& net0, const Eigen::VectorXd& theta, const ModelSpec& spec,
                           const SamplerConfig& cfg, Network* final_state) {
  StatSample out{Eigen::MatrixXd(cfg.count, spec.dim()), theta};
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < cfg.chains; ++c) run_chain(net0, theta, spec, cfg, c, out.stats, c == 0 ? final_state : nullptr);
  return out;
}

DyadSums logpl_sums(const DyadTerms& d, const Eigen::VectorXd& theta) {
  return blocked_sum(d, [&](Eigen::Index k, DyadSums& acc) { point_term(d, k, theta, acc); });
}

double logpl_value(const DyadTerms& d, const Eigen::VectorXd& theta) {
  const Eigen::Index n = d.alpha.size();
  const Eigen::Index blocks = (n + kDyadBlock - 1) / kDyadBlock;
  std::vector<double> parts(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index end = std::min(n, (b + 1) * kDyadBlock);
    double s = 0.0;
    for (Eigen::Index k = b * kDyadBlock; k < end; ++k) {
      const double eta = d.alpha[k] + d.beta.row(k).dot(theta);
      s += d.y[k] * eta - logistic_b(0, eta);
    }
    parts[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

DyadSums expected_sums(const DyadTerms& d, const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                       const GaussHermite& quad) {
  return blocked_sum(d, [&](Eigen::Index k, DyadSums& acc) { expected_term(d, k, mu, sigma, quad, acc); });
}

Eigen::VectorXd log_mean_exp_shifts(const Eigen::MatrixXd& stats, const Eigen::MatrixXd& shifts) {
  Eigen::VectorXd out(shifts.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < shifts.cols(); ++c) out[c] = shifted_log_mean_exp(stats, shifts.col(c));
  return out;
}

long iw_accumulate(const GaussianVariational& q, const LogJoint& log_joint, std::uint64_t seed, long round, int J,
                   Eigen::VectorXd& log_sum) {
  long bad = 0;
#pragma omp parallel for schedule(static) reduction(+ : bad)
  for (Eigen::Index i = 0; i < log_sum.size(); ++i) bad += iw_row(q, log_joint, seed, round, J, i, log_sum[i]);
  return bad;
}

}  // namespace parallel

}  // namespace vergm::kernels
