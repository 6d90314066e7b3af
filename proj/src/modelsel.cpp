#include "vergm/modelsel.hpp"

#include <cmath>
#include <iostream>

#include "vergm/error.hpp"

namespace vergm {

kernels::LogJoint path_one(const AdjustedPL& apl, const GaussianPrior& prior) {
  // Evaluated concurrently, so use the serial sum.
  return [&apl, &prior](const Eigen::VectorXd& theta) {
    return apl.log_M + kernels::serial::logpl_value(apl.terms(), theta) + prior.log_density(theta);
  };
}

kernels::LogJoint path_two(const ElboReference& ref, const GaussianPrior& prior) {
  return [&ref, &prior](const Eigen::VectorXd& theta) { return ref.loglik(theta) + prior.log_density(theta); };
}

IwlbResult iwlb(const GaussianVariational& q, const kernels::LogJoint& log_joint, const IwlbConfig& cfg,
                std::optional<double> initial) {
  if (cfg.N < 1 || cfg.J < 1) throw ConfigError("IWLB needs N >= 1 and J >= 1");
  IwlbResult res;
  Eigen::VectorXd log_sum = Eigen::VectorXd::Constant(cfg.N, -std::numeric_limits<double>::infinity());

  if (initial) {
    res.initial = *initial;
  } else {
    // Average single-draw bound over the first round's draws (same streams).
    double total = 0.0;
    long count = 0;
    for (int i = 0; i < cfg.N; ++i) {
      Engine eng = kernels::iw_engine(cfg.seed, i, 1);
      Eigen::VectorXd s(q.dim());
      for (int j = 0; j < cfg.J; ++j) {
        for (int k = 0; k < q.dim(); ++k) s[k] = standard_normal(eng);
        const Eigen::VectorXd theta = q.sample_theta(s);
        const double lw = log_joint(theta) - q.log_q(theta);
        if (std::isfinite(lw)) {
          total += lw;
          ++count;
        }
      }
    }
    if (count == 0) throw NumericalError("IWLB: no finite importance weight in the first round");
    res.initial = total / static_cast<double>(count);
  }

  double old = res.initial;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    res.nonfinite += kernels::parallel::iw_accumulate(q, log_joint, cfg.seed, round, cfg.J, log_sum);
    res.V += cfg.J;
    if (!log_sum.allFinite())
      throw NumericalError("IWLB: a replicate has all-zero weights (numerical underflow)");
    const Eigen::ArrayXd log_bar = log_sum.array() - std::log(static_cast<double>(res.V));
    const double value = log_bar.mean();
    res.trace.push_back(value);
    res.value = value;
    res.se = std::sqrt((log_bar - value).square().sum() / std::max(1, cfg.N - 1) / cfg.N);
    const double eps = (value - old) / std::abs(old);
    old = value;
    if (eps <= cfg.tol) {
      res.converged = true;
      break;
    }
  }
  if (res.nonfinite > 0)
    std::cerr << "warning: " << res.nonfinite << " non-finite importance weights treated as zero\n";
  return res;
}

Eigen::VectorXd bayes_factors(const Eigen::VectorXd& log_evidence, int reference) {
  if (log_evidence.size() < 2) throw ConfigError("Bayes factors need at least two models");
  if (reference < 0 || reference >= log_evidence.size()) throw ConfigError("reference model index out of range");
  return (log_evidence.array() - log_evidence[reference]).exp();
}

}  // namespace vergm
