#include "vergm/ncvmp.hpp"

#include <cmath>
#include <sstream>

#include "vergm/error.hpp"
#include "vergm/kernels.hpp"

namespace vergm {

namespace {

kernels::DyadSums moments(const AdjustedPL& apl, const GaussianVariational& q, const GaussHermite& quad) {
  if (apl.alpha.size() == 0) return kernels::DyadSums(q.dim());
  return kernels::parallel::expected_sums(apl.terms(), q.mu, q.sigma(), quad);
}

double bound_from(const AdjustedPL& apl, const GaussianPrior& prior, const GaussianVariational& q,
                  const kernels::DyadSums& s) {
  const Eigen::VectorXd d = q.mu - prior.mu0();
  const double trace = (prior.precision() * q.sigma()).trace();
  return apl.log_M + s.lin - s.b0 - 0.5 * prior.log_det() - 0.5 * d.dot(prior.precision() * d) - 0.5 * trace +
         q.log_det_C() + 0.5 * q.dim();
}

GaussianVariational step_from(const GaussianPrior& prior, const GaussianVariational& q, const kernels::DyadSums& s,
                              double rho) {
  const int p = q.dim();
  const Eigen::MatrixXd target = prior.precision() + s.curv;
  Eigen::MatrixXd prec = target;
  if (rho < 1.0) {
    const Eigen::MatrixXd old = q.C.triangularView<Eigen::Lower>().transpose().solve(
        q.C.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p)));
    prec = (1.0 - rho) * old + rho * target;
  }
  prec = 0.5 * (prec + prec.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) throw NumericalError("updated precision is not positive definite");
  const Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::VectorXd grad = s.grad - prior.precision() * (q.mu - prior.mu0());
  return GaussianVariational::from_covariance(q.mu + rho * llt.solve(grad), sigma);
}

}  // namespace

double elbo_tilde(const AdjustedPL& apl, const GaussianPrior& prior, const GaussianVariational& q,
                  const GaussHermite& quad) {
  return bound_from(apl, prior, q, moments(apl, q, quad));
}

GaussianVariational ncvmp_default_init(const AdjustedPL& apl) {
  const int p = apl.dim();
  return GaussianVariational(apl.theta_ml, 0.1 * Eigen::MatrixXd::Identity(p, p));
}

GaussianVariational ncvmp_step(const AdjustedPL& apl, const GaussianPrior& prior, const GaussianVariational& q,
                               const GaussHermite& quad, double rho) {
  return step_from(prior, q, moments(apl, q, quad), rho);
}

NcvmpResult ncvmp_fit(const AdjustedPL& apl, const GaussianPrior& prior, const GaussianVariational& init,
                      const NcvmpConfig& cfg) {
  if (init.dim() != apl.dim() || prior.dim() != apl.dim())
    throw ConfigError("prior, initial value and adjusted pseudolikelihood disagree on dimension");
  const GaussHermite quad(cfg.quad_order);
  NcvmpResult res;
  res.q = init;
  kernels::DyadSums s = moments(apl, res.q, quad);
  double bound = bound_from(apl, prior, res.q, s);
  res.trace.push_back(bound);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    res.iterations = it;
    double rho = 1.0;
    bool accepted = false;
    GaussianVariational next;
    kernels::DyadSums next_s;
    double next_bound = bound;
    for (int attempt = 0; attempt <= cfg.max_halvings + 1; ++attempt) {
      if (attempt > 0) rho = cfg.rho0 * std::pow(0.5, attempt - 1);
      try {
        next = step_from(prior, res.q, s, rho);
      } catch (const NumericalError&) {
        continue;
      }
      next_s = moments(apl, next, quad);
      next_bound = bound_from(apl, prior, next, next_s);
      // Differences at round-off level count as no decrease.
      if (next_bound >= bound - 1e-12 * std::max(1.0, std::abs(bound))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (std::isfinite(next_bound) && std::abs(next_bound - bound) <= cfg.tol * std::abs(bound)) {
        res.converged = true;
        return res;
      }
      std::ostringstream msg;
      msg << "NCVMP bound kept decreasing after " << cfg.max_halvings << " step halvings at iteration " << it
          << "; trace:";
      for (double v : res.trace) msg << ' ' << v;
      throw NonConvergence(msg.str());
    }
    const double rel = (next_bound - bound) / std::max(std::abs(bound), 1e-300);
    res.q = std::move(next);
    s = std::move(next_s);
    bound = next_bound;
    res.trace.push_back(bound);
    res.rho.push_back(rho);
    if (rel < cfg.tol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace vergm
