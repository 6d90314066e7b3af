#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "vergm/gaussian.hpp"
#include "vergm/kernels.hpp"
#include "vergm/pseudo.hpp"
#include "vergm/svi.hpp"

namespace vergm {

struct IwlbConfig {
  int N = 1000;
  int J = 50;
  double tol = 1e-5;
  int max_rounds = 2000;
  std::uint64_t seed = 1;
};

struct IwlbResult {
  double value = 0.0;        // final IWLB estimate
  long V = 0;                // importance samples per replicate
  std::vector<double> trace;  // estimate after each round
  double initial = 0.0;      // bound the first round is compared with
  long nonfinite = 0;        // log weights that were not finite (counted as zero weight)
  double se = 0.0;           // standard error of the replicate mean
  bool converged = false;
};

/// log p(y|theta) + log p(theta), the numerator of the importance weight.
kernels::LogJoint path_one(const AdjustedPL& apl, const GaussianPrior& prior);
kernels::LogJoint path_two(const ElboReference& ref, const GaussianPrior& prior);

/// Importance-weighted lower bound from q. `initial` seeds the first
/// convergence comparison (the fitted method's ELBO); without it the average
/// single-draw ELBO of the first round is used.
IwlbResult iwlb(const GaussianVariational& q, const kernels::LogJoint& log_joint, const IwlbConfig& cfg,
                std::optional<double> initial = std::nullopt);

/// exp(L_r - L_ref) for every model r.
Eigen::VectorXd bayes_factors(const Eigen::VectorXd& log_evidence, int reference);

}  // namespace vergm
