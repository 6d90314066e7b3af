#include "vergm/pseudo.hpp"

#include <cmath>

#include "vergm/error.hpp"
#include "vergm/numeric.hpp"
#include "vergm/oracle.hpp"
#include "vergm/quadrature.hpp"

namespace vergm {

namespace {

// |eta| beyond this means a fitted probability within ~1e-11 of 0 or 1.
constexpr double kSeparationEta = 25.0;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& eta) {
  return eta.unaryExpr([](double x) { return logistic_b(1, x); });
}

void check_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  for (Eigen::Index k = 0; k < X.cols(); ++k) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.leftCols(k + 1));
    qr.setThreshold(1e-10);
    if (qr.rank() < k + 1)
      throw NonConvergence("change statistics of term '" + names[static_cast<std::size_t>(k)] +
                           "' are constant or collinear with earlier terms; pseudolikelihood is not identifiable");
  }
}

}  // namespace

double log_pl(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = X * theta;
  double s = 0.0;
  for (Eigen::Index k = 0; k < eta.size(); ++k) s += y[k] * eta[k] - logistic_b(0, eta[k]);
  return s;
}

Eigen::VectorXd logistic_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names,
                             double grad_tol) {
  const auto p = X.cols();
  if (X.rows() == 0) throw NonConvergence("no dyads to fit");
  check_rank(X, names);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  double f = log_pl(X, y, theta);
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd eta = X * theta;
    Eigen::Index worst;
    if (eta.cwiseAbs().maxCoeff(&worst) > kSeparationEta) {
      Eigen::Index term;
      (X.row(worst).transpose().cwiseProduct(theta)).cwiseAbs().maxCoeff(&term);
      throw NonConvergence("pseudolikelihood separation: fitted probabilities reach 0 or 1, driven by term '" +
                           names[static_cast<std::size_t>(term)] + "'");
    }
    const Eigen::VectorXd mu = sigmoid(eta);
    const Eigen::VectorXd grad = X.transpose() * (y - mu);
    if (grad.norm() <= grad_tol) return theta;
    const Eigen::VectorXd w = eta.unaryExpr([](double x) { return logistic_b(2, x); });
    Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) {
      H.diagonal().array() += 1e-8;
      llt.compute(H);
      if (llt.info() != Eigen::Success) throw NonConvergence("pseudolikelihood Hessian is singular");
    }
    const Eigen::VectorXd step = llt.solve(grad);
    double t = 1.0;
    Eigen::VectorXd next = theta + step;
    double fn = log_pl(X, y, next);
    while (!(fn >= f) && t > 1e-10) {
      t *= 0.5;
      next = theta + t * step;
      fn = log_pl(X, y, next);
    }
    if (!(fn >= f)) break;
    theta = next;
    f = fn;
  }
  const Eigen::VectorXd grad = X.transpose() * (y - sigmoid(X * theta));
  if (grad.norm() <= 1e3 * grad_tol) return theta;
  throw NonConvergence("pseudolikelihood Newton iterations did not converge (gradient norm " +
                       std::to_string(grad.norm()) + ")");
}

Eigen::VectorXd mple(const Network& net, const ModelSpec& spec) {
  spec.validate(net);
  return logistic_fit(all_change_stats(net, spec), dyad_values(net), spec.names());
}

Eigen::VectorXd maximize_log_ratio(const Eigen::MatrixXd& stats, const Eigen::VectorXd& s_obs,
                                   const Eigen::MatrixXd& cov, double radius) {
  const auto p = stats.cols();
  auto objective = [&](const Eigen::VectorXd& d) { return s_obs.dot(d) - log_mean_exp(stats * d); };
  Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
  double f = 0.0;
  const double r2 = radius * radius;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd lin = stats * d;
    const Eigen::VectorXd w = (lin.array() - log_sum_exp(lin)).exp();
    const Eigen::VectorXd mean = stats.transpose() * w;
    const Eigen::VectorXd grad = s_obs - mean;
    if (grad.norm() <= 1e-10 * (1.0 + s_obs.norm())) break;
    const Eigen::MatrixXd centered = stats.rowwise() - mean.transpose();
    Eigen::MatrixXd H = centered.transpose() * w.asDiagonal() * centered;
    H.diagonal().array() += 1e-12 * (1.0 + H.diagonal().maxCoeff());
    const Eigen::VectorXd step = H.ldlt().solve(grad);
    Eigen::VectorXd next = d + step;
    bool boundary = false;
    if (next.dot(cov * next) > r2) {
      // Largest t with (d + t step)^T cov (d + t step) = r^2.
      const double a = step.dot(cov * step), b = 2.0 * d.dot(cov * step), c = d.dot(cov * d) - r2;
      const double t = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
      next = d + std::clamp(t, 0.0, 1.0) * step;
      boundary = true;
    }
    const Eigen::VectorXd dir = next - d;
    double fn = objective(next);
    double scale = 1.0;
    while (!(fn >= f) && scale > 1e-10) {
      scale *= 0.5;
      next = d + scale * dir;
      fn = objective(next);
    }
    if (!(fn >= f)) break;
    d = next;
    f = fn;
    if (boundary) break;
  }
  return d;
}

McmleResult mcmc_mle(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta0, const McmleConfig& cfg) {
  if (theta0.size() != spec.dim()) throw ConfigError("starting value has the wrong length");
  if (!theta0.allFinite()) throw ConfigError("starting value is not finite");
  const Eigen::VectorXd s_obs = suff_stats(net, spec);
  const int p = spec.dim();
  const auto names = spec.names();

  auto simulate = [&](const Eigen::VectorXd& theta, int count, std::uint64_t seed, Eigen::MatrixXd& cov) {
    SamplerConfig sc = cfg.sampler;
    sc.count = count;
    sc.seed = seed;
    StatSample S = tnt_sample(net, theta, spec, sc);
    cov = S.cov();
    for (int k = 0; k < p; ++k)
      if (!(cov(k, k) > 1e-12 * (1.0 + std::abs(S.mean()[k]))))
        throw DegeneracyError("simulated statistic '" + names[static_cast<std::size_t>(k)] +
                              "' has zero variance at the current parameter");
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
      throw DegeneracyError("simulated statistics are collinear at the current parameter");
    return S;
  };

  McmleResult res;
  res.theta = theta0;
  Eigen::MatrixXd cov;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    res.rounds = round;
    const StatSample S = simulate(res.theta, cfg.sampler.count, derive_seed(cfg.sampler.seed, "mcmle", round), cov);
    const Eigen::VectorXd d = maximize_log_ratio(S.stats, s_obs, cov, cfg.trust_radius);
    res.theta += d;
    if (d.norm() < cfg.tol || d.dot(cov * d) < 4.0 * p / cfg.sampler.count) {
      res.converged = true;
      break;
    }
  }
  const StatSample S = simulate(res.theta, cfg.sampler.count * cfg.final_factor,
                                derive_seed(cfg.sampler.seed, "mcmle-final"), cov);
  res.theta += maximize_log_ratio(S.stats, s_obs, cov, cfg.trust_radius);
  return res;
}

Eigen::MatrixXd curvature_adjust(const Eigen::MatrixXd& X, const Eigen::VectorXd& theta_pl,
                                 const Eigen::MatrixXd& cov_ml) {
  const Eigen::VectorXd w = (X * theta_pl).unaryExpr([](double x) { return logistic_b(2, x); });
  const Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
  Eigen::LLT<Eigen::MatrixXd> l1(H), l2(0.5 * (cov_ml + cov_ml.transpose()));
  if (l1.info() != Eigen::Success) throw NumericalError("negative pseudolikelihood Hessian is not positive definite");
  if (l2.info() != Eigen::Success) throw NumericalError("covariance of statistics at the MLE is not positive definite");
  const Eigen::MatrixXd R1 = l1.matrixU();
  const Eigen::MatrixXd R2 = l2.matrixU();
  Eigen::MatrixXd W = R1.triangularView<Eigen::Upper>().solve(R2);
  return W.triangularView<Eigen::Upper>();
}

std::vector<double> TemperSchedule::temps() const {
  std::vector<double> t(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) t[static_cast<std::size_t>(j)] = static_cast<double>(j) / J;
  t.back() = 1.0;
  return t;
}

double log_z_tempered(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta,
                      const TemperSchedule& sched) {
  if (theta.size() != spec.dim()) throw ConfigError("theta has the wrong length");
  if (sched.J < 1 || sched.K < 1) throw ConfigError("tempering needs J >= 1 and K >= 1");
  const double dyads = static_cast<double>(net.dyad_count());
  const int p = spec.dim();

  // target(t) = base + t * moving
  Eigen::VectorXd base = Eigen::VectorXd::Zero(p), moving = theta;
  double log_z = dyads * std::log(2.0);
  if (sched.modified) {
    if (!spec.edges_first()) throw ConfigError("the modified tempering schedule needs 'edges' as the first term");
    base[0] = theta[0];
    moving[0] = 0.0;
    log_z = dyads * logistic_b(0, theta[0]);
  }
  if (moving.isZero(0.0)) return log_z;

  const std::vector<double> t = sched.temps();
  Network state = net;
  for (int j = 1; j <= sched.J; ++j) {
    const Eigen::VectorXd at = base + t[static_cast<std::size_t>(j - 1)] * moving;
    SamplerConfig sc{sched.aux_iters, sched.thin, sched.K, 1, derive_seed(sched.seed, "temper", j)};
    Network next;
    const StatSample S = tnt_sample(state, at, spec, sc, &next);
    state = std::move(next);
    const double dt = t[static_cast<std::size_t>(j)] - t[static_cast<std::size_t>(j - 1)];
    log_z += log_mean_exp(S.stats * (dt * moving));
  }
  return log_z;
}

double magnitude_adjust(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta_ml,
                        const Eigen::VectorXd& theta_pl, double log_z_ml) {
  const Eigen::MatrixXd X = all_change_stats(net, spec);
  return theta_ml.dot(suff_stats(net, spec)) - log_z_ml - log_pl(X, dyad_values(net), theta_pl);
}

LogPLEval adjusted_logpl(const AdjustedPL& apl, const Eigen::VectorXd& theta) {
  const kernels::DyadSums s = kernels::parallel::logpl_sums(apl.terms(), theta);
  return {apl.log_M + s.lin - s.b0, s.grad, -s.curv};
}

std::string spec_key(const ModelSpec& spec) {
  std::string key;
  for (const std::string& n : spec.names()) key += (key.empty() ? "" : ",") + n;
  return key;
}

AdjustedPL assemble_adjusted_pl(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta_pl,
                                const Eigen::VectorXd& theta_ml, const Eigen::MatrixXd& cov_ml, double log_z_ml) {
  const Eigen::MatrixXd X = all_change_stats(net, spec);
  AdjustedPL a;
  a.spec = spec_key(spec);
  a.network_hash = net.hash();
  a.theta_pl = theta_pl;
  a.theta_ml = theta_ml;
  a.cov_ml = cov_ml;
  a.log_z_ml = log_z_ml;
  a.W = curvature_adjust(X, theta_pl, cov_ml);
  a.s_obs = suff_stats(net, spec);
  a.y = dyad_values(net);
  a.log_M = theta_ml.dot(a.s_obs) - log_z_ml - log_pl(X, a.y, theta_pl);
  a.alpha = X * (theta_pl - a.W * theta_ml);
  a.beta = X * a.W;
  return a;
}

AdjustedPL build_adjusted_pl(const Network& net, const ModelSpec& spec, const AdjustConfig& cfg) {
  const Eigen::VectorXd theta_pl = mple(net, spec);
  McmleConfig mc = cfg.mcmle;
  mc.sampler.seed = derive_seed(cfg.seed, "adjust-mcmle");
  const McmleResult ml = mcmc_mle(net, spec, theta_pl, mc);

  SamplerConfig sc = cfg.cov_sampler;
  sc.seed = derive_seed(cfg.seed, "adjust-cov");
  const StatSample S = tnt_sample(net, ml.theta, spec, sc);

  TemperSchedule ts = cfg.temper;
  ts.seed = derive_seed(cfg.seed, "adjust-temper");
  const double log_z = log_z_tempered(net, spec, ml.theta, ts);

  AdjustedPL a = assemble_adjusted_pl(net, spec, theta_pl, ml.theta, S.cov(), log_z);
  a.seed = cfg.seed;
  return a;
}

AdjustedPL build_adjusted_pl_exact(const Network& net, const ModelSpec& spec) {
  const ExactErgm exact(net, spec);
  const Eigen::VectorXd s_obs = suff_stats(net, spec);
  const Eigen::VectorXd theta_ml = exact.mle(s_obs);
  const OracleResult r = exact.at(theta_ml);
  return assemble_adjusted_pl(net, spec, mple(net, spec), theta_ml, r.cov, r.log_z);
}

}  // namespace vergm
