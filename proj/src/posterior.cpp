#include "vergm/posterior.hpp"

#include <algorithm>
#include <cmath>

#include "vergm/error.hpp"
#include "vergm/rng.hpp"

namespace vergm {

GaussianVariational laplace_fit(const AdjustedPL& apl, const GaussianPrior& prior) {
  const int p = apl.dim();
  if (prior.dim() != p) throw ConfigError("prior dimension does not match the model");
  auto objective = [&](const Eigen::VectorXd& th) { return adjusted_logpl(apl, th).value + prior.log_density(th); };
  Eigen::VectorXd theta = apl.theta_ml;
  double f = objective(theta);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  for (int it = 0; it < 200; ++it) {
    const LogPLEval e = adjusted_logpl(apl, theta);
    grad = e.grad + prior.grad_log_density(theta);
    hess = e.hess - prior.precision();
    if (grad.norm() <= 1e-10 * (1.0 + std::abs(f))) break;
    Eigen::LLT<Eigen::MatrixXd> llt(-hess);
    // Away from a maximum fall back to gradient ascent.
    const Eigen::VectorXd step = llt.info() == Eigen::Success ? Eigen::VectorXd(llt.solve(grad)) : Eigen::VectorXd(grad);
    double t = 1.0;
    Eigen::VectorXd next = theta + step;
    double fn = objective(next);
    while (!(fn >= f) && t > 1e-12) {
      t *= 0.5;
      next = theta + t * step;
      fn = objective(next);
    }
    if (!(fn >= f)) break;
    theta = next;
    f = fn;
  }
  const LogPLEval e = adjusted_logpl(apl, theta);
  hess = e.hess - prior.precision();
  Eigen::LLT<Eigen::MatrixXd> llt(-hess);
  if (llt.info() != Eigen::Success) throw NumericalError("Laplace: Hessian is not negative definite at the optimum (saddle)");
  return GaussianVariational::from_covariance(theta, llt.solve(Eigen::MatrixXd::Identity(p, p)));
}

McmcChain exchange_sample(const Network& net, const ModelSpec& spec, const GaussianPrior& prior,
                          const Eigen::VectorXd& theta0, const ExchangeConfig& cfg) {
  const int p = spec.dim();
  if (cfg.iters <= cfg.burnin || cfg.burnin < 0) throw ConfigError("exchange needs iters > burnin >= 0");
  if (!(cfg.sigma_eps >= 0.0)) throw ConfigError("proposal sd must be non-negative");
  if (theta0.size() != p || prior.dim() != p) throw ConfigError("starting value or prior has the wrong dimension");

  const Eigen::VectorXd s_y = suff_stats(net, spec);
  Engine eng = make_engine(cfg.seed, "exchange");
  McmcChain chain;
  chain.config = cfg;
  chain.draws.resize(cfg.iters - cfg.burnin, p);
  Eigen::VectorXd theta = theta0;
  double lp = prior.log_density(theta);
  long accepted = 0;
  for (long t = 0; t < cfg.iters; ++t) {
    Eigen::VectorXd prop(p);
    for (int k = 0; k < p; ++k) prop[k] = theta[k] + cfg.sigma_eps * standard_normal(eng);
    TntChain aux(net, spec, derive_seed(cfg.seed, "exchange-aux", static_cast<std::uint64_t>(t)));
    aux.run(prop, cfg.aux_iters);
    const Eigen::VectorXd s_aux = aux.stats();
    const double lp_prop = prior.log_density(prop);
    const double log_a = (theta - prop).dot(s_aux) + (prop - theta).dot(s_y) + lp_prop - lp;
    if (log_a >= 0.0 || std::log(uniform01(eng)) < log_a) {
      theta = prop;
      lp = lp_prop;
      ++accepted;
    }
    if (t >= cfg.burnin) chain.draws.row(t - cfg.burnin) = theta.transpose();
  }
  chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.iters);
  return chain;
}

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr int kGrid = 512;
constexpr double kFloor = 1e-12;

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}
}  // namespace

Marginal Marginal::from_samples(std::vector<double> xs) {
  if (xs.size() < 2) throw ConfigError("need at least two draws for a density estimate");
  std::sort(xs.begin(), xs.end());
  Marginal m;
  m.kind_ = Kind::Kde;
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) throw NumericalError("draws are all identical; density estimate is degenerate");
  m.h_ = 0.9 * spread * std::pow(n, -0.2);
  m.lo_ = xs.front() - 4.0 * m.h_;
  m.hi_ = xs.back() + 4.0 * m.h_;
  m.mean_ = mean;
  m.sd_ = sd;
  m.xs_ = std::move(xs);
  return m;
}

Marginal Marginal::gaussian(double mean, double sd) {
  if (!(sd > 0.0)) throw ConfigError("normal marginal needs sd > 0");
  Marginal m;
  m.kind_ = Kind::Gaussian;
  m.mean_ = mean;
  m.sd_ = sd;
  m.lo_ = mean - 8.0 * sd;
  m.hi_ = mean + 8.0 * sd;
  return m;
}

Marginal Marginal::tabulated(std::vector<double> grid, std::vector<double> density) {
  if (grid.size() < 2 || grid.size() != density.size()) throw ConfigError("tabulated density needs matching grids");
  Marginal m;
  m.kind_ = Kind::Table;
  m.lo_ = grid.front();
  m.hi_ = grid.back();
  m.xs_ = std::move(grid);
  m.ys_ = std::move(density);
  return m;
}

double Marginal::density(double x) const {
  switch (kind_) {
    case Kind::Gaussian: {
      const double z = (x - mean_) / sd_;
      return kInvSqrt2Pi / sd_ * std::exp(-0.5 * z * z);
    }
    case Kind::Table: {
      if (x < xs_.front() || x > xs_.back()) return 0.0;
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      if (it == xs_.end()) return ys_.back();
      const auto k = static_cast<std::size_t>(it - xs_.begin());
      const double f = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
      return ys_[k - 1] + f * (ys_[k] - ys_[k - 1]);
    }
    case Kind::Kde: {
      // Only draws within 8 bandwidths contribute measurably.
      const auto from = std::lower_bound(xs_.begin(), xs_.end(), x - 8.0 * h_);
      const auto to = std::upper_bound(xs_.begin(), xs_.end(), x + 8.0 * h_);
      double s = 0.0;
      for (auto it = from; it != to; ++it) {
        const double z = (x - *it) / h_;
        s += std::exp(-0.5 * z * z);
      }
      return s * kInvSqrt2Pi / (h_ * static_cast<double>(xs_.size()));
    }
  }
  return 0.0;
}

double marginal_kl(const Marginal& a, const Marginal& b) {
  if (a.upper() < b.lower() || b.upper() < a.lower())
    throw NumericalError("marginal KL: the two densities have no overlapping support");
  const double lo = std::min(a.lower(), b.lower()), hi = std::max(a.upper(), b.upper());
  const double dx = (hi - lo) / (kGrid - 1);
  std::vector<double> pa(kGrid), pb(kGrid);
  double za = 0.0, zb = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + g * dx;
    pa[g] = std::max(a.density(x), kFloor);
    pb[g] = std::max(b.density(x), kFloor);
    za += pa[g];
    zb += pb[g];
  }
  double kl = 0.0;
  for (int g = 0; g < kGrid; ++g) {
    const double qa = pa[g] / za, qb = pb[g] / zb;
    kl += qa * std::log(qa / qb);
  }
  return std::max(kl, 0.0);
}

namespace {
std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) v[static_cast<std::size_t>(r)] = m(r, c);
  return v;
}
}  // namespace

Eigen::VectorXd marginal_kl(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw ConfigError("draw matrices have different numbers of parameters");
  Eigen::VectorXd kl(a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    kl[c] = marginal_kl(Marginal::from_samples(column(a, c)), Marginal::from_samples(column(b, c)));
  return kl;
}

Eigen::VectorXd marginal_kl(const GaussianVariational& q, const Eigen::MatrixXd& draws) {
  if (q.dim() != draws.cols()) throw ConfigError("posterior and draws have different numbers of parameters");
  const Eigen::VectorXd sd = q.sd();
  Eigen::VectorXd kl(q.dim());
  for (int c = 0; c < q.dim(); ++c)
    kl[c] = marginal_kl(Marginal::gaussian(q.mu[c], sd[c]), Marginal::from_samples(column(draws, c)));
  return kl;
}

}  // namespace vergm
