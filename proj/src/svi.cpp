#include "vergm/svi.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vergm/error.hpp"
#include "vergm/numeric.hpp"

namespace vergm {

Eigen::VectorXd Adam::step(const Eigen::VectorXd& grad) {
  if (t_ == 0) {
    m_ = Eigen::VectorXd::Zero(grad.size());
    v_ = Eigen::VectorXd::Zero(grad.size());
  }
  ++t_;
  m_ = params_.beta1 * m_ + (1.0 - params_.beta1) * grad;
  v_ = params_.beta2 * v_ + (1.0 - params_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(params_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(params_.beta2, static_cast<double>(t_));
  return params_.step * (m_ / c1).array() / ((v_ / c2).array().sqrt() + params_.eps);
}

void ParticleStore::add(Particle p) {
  if (p.stats.rows() != K_)
    throw ConfigError("particle has " + std::to_string(p.stats.rows()) + " statistics, store expects " +
                      std::to_string(K_));
  particles_.push_back(std::move(p));
}

int ParticleStore::nearest(const Eigen::VectorXd& theta, const Eigen::MatrixXd& C) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int u = 0; u < size(); ++u) {
    const Eigen::VectorXd z = C.triangularView<Eigen::Lower>().solve(theta - (*this)[u].theta);
    const double d = z.squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = u;
    }
  }
  return best;
}

SnisEstimate snis_estimate(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta_u, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd lw = stats * (theta - theta_u);
  const Eigen::VectorXd w = (lw.array() - log_sum_exp(lw)).exp();
  SnisEstimate e;
  e.ess = 1.0 / w.squaredNorm();
  e.mean = stats.transpose() * w;
  return e;
}

SnisEstimate snis_mean_stats(const ParticleStore& store, const Eigen::VectorXd& theta, const Eigen::MatrixXd& C) {
  if (store.empty()) throw ConfigError("particle store is empty");
  const int u = store.nearest(theta, C);
  SnisEstimate e = snis_estimate(store[u].stats, store[u].theta, theta);
  e.particle = u;
  if (e.ess < store.ess_threshold()) {
    e.refresh = true;
    e.mean.resize(0);
  }
  return e;
}

Eigen::VectorXd grad_logjoint(const Eigen::VectorXd& theta, const Eigen::VectorXd& s_y,
                              const Eigen::VectorXd& mean_stats, const GaussianPrior& prior) {
  return s_y - mean_stats + prior.grad_log_density(theta);
}

double ElboReference::loglik(const Eigen::VectorXd& theta) const {
  return theta.dot(s_obs) - log_z_ml - log_mean_exp(stats0 * (theta - theta_ml));
}

ElboReference make_elbo_reference(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta_ml,
                                  double log_z_ml, int K0, const SamplerConfig& sampler) {
  if (K0 < 1) throw ConfigError("K0 must be positive");
  SamplerConfig sc = sampler;
  sc.count = K0;
  ElboReference ref;
  ref.stats0 = tnt_sample(net, theta_ml, spec, sc).stats;
  ref.theta_ml = theta_ml;
  ref.log_z_ml = log_z_ml;
  ref.s_obs = suff_stats(net, spec);
  return ref;
}

double elbo_hat(const Eigen::VectorXd& theta, const Eigen::VectorXd& s, const GaussianVariational& q,
                const GaussianPrior& prior, const ElboReference& ref) {
  return elbo_at(q, s, theta, ref.loglik(theta), prior);
}

SviResult svi_fit(const Network& net, const ModelSpec& spec, const GaussianPrior& prior,
                  const GaussianVariational& init, const SviConfig& cfg, const SamplerConfig& sampler,
                  const ElboReference& ref) {
  const int p = spec.dim();
  if (init.dim() != p || prior.dim() != p) throw ConfigError("prior or initial value has the wrong dimension");
  if (cfg.K < 1) throw ConfigError("K must be positive");
  if (cfg.check_every < 1) throw ConfigError("check_every must be positive");

  const Eigen::VectorXd s_y = suff_stats(net, spec);
  auto simulate = [&](const Eigen::VectorXd& theta, long iter) {
    SamplerConfig sc = sampler;
    sc.count = cfg.K;
    sc.seed = derive_seed(cfg.seed, "svi-sim", static_cast<std::uint64_t>(iter));
    return tnt_sample(net, theta, spec, sc).stats;
  };

  ParticleStore store(cfg.K, cfg.ess_frac * cfg.K);
  SviResult res;
  if (cfg.mode != SviMode::MonteCarlo) {
    store.add({ref.theta_ml, simulate(ref.theta_ml, 0), 0});
    res.particle_iters.push_back(0);
  }

  Eigen::VectorXd mu = init.mu;
  Eigen::MatrixXd Cp = to_log_diag(init.C);
  Adam adam(cfg.adam);
  Engine eng = make_engine(cfg.seed, "svi-draws");
  const Eigen::Index nv = p * (p + 1) / 2;
  double lbar_old = std::numeric_limits<double>::quiet_NaN();
  double block = 0.0;

  for (long t = 1; t <= cfg.max_iters; ++t) {
    res.iterations = t;
    const GaussianVariational q(mu, from_log_diag(Cp));
    Eigen::VectorXd s(p);
    for (int k = 0; k < p; ++k) s[k] = standard_normal(eng);
    const Eigen::VectorXd theta = q.sample_theta(s);

    Eigen::VectorXd mean;
    double ess = std::numeric_limits<double>::quiet_NaN();
    bool refreshed = false;
    if (cfg.mode == SviMode::MonteCarlo) {
      mean = simulate(theta, t).colwise().mean().transpose();
      refreshed = true;
    } else if (cfg.mode == SviMode::FixedSnis) {
      const SnisEstimate e = snis_estimate(store[0].stats, store[0].theta, theta);
      mean = e.mean;
      ess = e.ess;
    } else {
      const SnisEstimate e = snis_mean_stats(store, theta, q.C);
      ess = e.ess;
      if (e.refresh) {
        Eigen::MatrixXd S = simulate(theta, t);
        mean = S.colwise().mean().transpose();
        store.add({theta, std::move(S), t});
        res.particle_iters.push_back(t);
        refreshed = true;
      } else {
        mean = e.mean;
      }
    }

    const Eigen::VectorXd g_mu =
        grad_logjoint(theta, s_y, mean, prior) + q.C.triangularView<Eigen::Lower>().transpose().solve(s);
    const Eigen::VectorXd g_c = dc_diagonal(q.C).cwiseProduct(vech(g_mu * s.transpose()));
    if (!g_mu.allFinite() || !g_c.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite SVI gradient at iteration " << t << ", theta = " << theta.transpose()
          << ", mu = " << mu.transpose();
      throw NumericalError(msg.str());
    }
    Eigen::VectorXd grad(p + nv);
    grad << g_mu, g_c;
    const Eigen::VectorXd inc = adam.step(grad);
    mu += inc.head(p);
    Cp = unvech(vech(Cp) + inc.tail(nv), p);

    const double lhat = elbo_hat(theta, s, q, prior, ref);
    res.lhat.push_back(lhat);
    res.ess.push_back(ess);
    res.refreshed.push_back(refreshed ? 1 : 0);
    block += lhat;
    if (t % cfg.check_every == 0) {
      const double lbar = block / cfg.check_every;
      block = 0.0;
      res.lbar.push_back(lbar);
      if (std::isfinite(lbar_old)) {
        const double eps = (lbar - lbar_old) / std::abs(lbar_old);
        if (eps < cfg.tol) {
          res.converged = true;
          lbar_old = lbar;
          break;
        }
      }
      lbar_old = lbar;
    }
  }
  res.q = GaussianVariational(mu, from_log_diag(Cp));
  return res;
}

}  // namespace vergm
