#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "vergm/network.hpp"
#include "vergm/rng.hpp"
#include "vergm/stats.hpp"

namespace vergm {

struct SamplerConfig {
  long aux_iters = 30000;  ///< burn-in steps per chain
  long thin = 1000;        ///< steps between retained networks
  int count = 1;           ///< retained networks K
  int chains = 1;          ///< independent chains sharing the K draws
  std::uint64_t seed = 1;
};

/// Sufficient statistics of K simulated networks, one row per network.
struct StatSample {
  Eigen::MatrixXd stats;
  Eigen::VectorXd theta;

  int size() const { return static_cast<int>(stats.rows()); }
  Eigen::VectorXd mean() const { return stats.colwise().mean().transpose(); }
  Eigen::MatrixXd cov() const;
};

/// Tie-no-tie Metropolis-Hastings chain over networks on a fixed node set.
/// With probability 1/2 a present tie is proposed for removal, otherwise an
/// absent one for addition; if one of the two sets is empty the other is used.
/// The acceptance ratio carries the exact proposal correction.
class TntChain {
 public:
  TntChain(Network start, const ModelSpec& spec, std::uint64_t seed);

  /// One MH step at `theta`; returns whether the toggle was accepted.
  bool step(const Eigen::VectorXd& theta);
  void run(const Eigen::VectorXd& theta, long steps);

  const Network& state() const { return net_; }
  StatVector stats() const { return eval_.suff_stats(net_); }
  long accepted() const { return accepted_; }
  long proposed() const { return proposed_; }

 private:
  void toggle(int i, int j);

  Network net_;
  StatEvaluator eval_;
  Engine eng_;
  std::vector<Dyad> edge_list_;
  std::vector<long> edge_pos_;  // dyad index -> slot in edge_list_, -1 if absent
  std::vector<double> delta_;
  long accepted_ = 0;
  long proposed_ = 0;
};

/// Draws cfg.count networks from p(y | theta). Each chain starts at `net0`,
/// burns in for cfg.aux_iters steps and keeps every cfg.thin-th state; chain c
/// is seeded from (cfg.seed, c), so output does not depend on worker count.
/// If `final_state` is given it receives the last state of chain 0.
StatSample tnt_sample(const Network& net0, const Eigen::VectorXd& theta, const ModelSpec& spec,
                      const SamplerConfig& cfg, Network* final_state = nullptr);

}  // namespace vergm
