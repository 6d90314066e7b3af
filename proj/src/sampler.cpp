#include "vergm/sampler.hpp"

#include <cmath>

#include "vergm/error.hpp"
#include "vergm/kernels.hpp"

namespace vergm {

Eigen::MatrixXd StatSample::cov() const {
  const Eigen::RowVectorXd mu = stats.colwise().mean();
  const Eigen::MatrixXd centered = stats.rowwise() - mu;
  const double denom = std::max(1, size() - 1);
  return centered.transpose() * centered / denom;
}

TntChain::TntChain(Network start, const ModelSpec& spec, std::uint64_t seed)
    : net_(std::move(start)), eval_(spec, net_), eng_(seed), delta_(static_cast<std::size_t>(spec.dim())) {
  edge_pos_.assign(static_cast<std::size_t>(net_.dyad_count()), -1);
  for (const Dyad& d : net_.edges()) {
    edge_pos_[static_cast<std::size_t>(dyad_index(net_.size(), d.i, d.j))] = static_cast<long>(edge_list_.size());
    edge_list_.push_back(d);
  }
}

void TntChain::toggle(int i, int j) {
  const auto idx = static_cast<std::size_t>(dyad_index(net_.size(), i, j));
  if (edge_pos_[idx] >= 0) {
    const auto slot = static_cast<std::size_t>(edge_pos_[idx]);
    const Dyad last = edge_list_.back();
    edge_list_[slot] = last;
    edge_pos_[static_cast<std::size_t>(dyad_index(net_.size(), last.i, last.j))] = static_cast<long>(slot);
    edge_list_.pop_back();
    edge_pos_[idx] = -1;
  } else {
    edge_pos_[idx] = static_cast<long>(edge_list_.size());
    edge_list_.push_back({i, j});
  }
  net_.toggle(i, j);
}

namespace {

// Probability of proposing a removal given the tie and no-tie set sizes.
double tie_prob(long ties, long non_ties) {
  if (ties == 0) return 0.0;
  if (non_ties == 0) return 1.0;
  return 0.5;
}

}  // namespace

bool TntChain::step(const Eigen::VectorXd& theta) {
  const int n = net_.size();
  const long total = net_.dyad_count();
  const long ties = static_cast<long>(edge_list_.size());
  const long non_ties = total - ties;
  if (total == 0) return false;
  ++proposed_;

  int i, j;
  const bool remove = uniform01(eng_) < tie_prob(ties, non_ties);
  if (remove) {
    const Dyad d = edge_list_[uniform_index(eng_, static_cast<std::uint64_t>(ties))];
    i = d.i;
    j = d.j;
  } else {
    // Uniform non-tie by rejection from uniform dyads.
    do {
      i = static_cast<int>(uniform_index(eng_, static_cast<std::uint64_t>(n)));
      j = static_cast<int>(uniform_index(eng_, static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
    } while (net_.has_edge(i, j));
    if (i > j) std::swap(i, j);
  }

  eval_.change_stats(net_, i, j, delta_);
  double lin = 0.0;
  for (std::size_t k = 0; k < delta_.size(); ++k) lin += theta[static_cast<Eigen::Index>(k)] * delta_[k];

  double log_ratio;
  if (remove) {
    const double fwd = tie_prob(ties, non_ties) / static_cast<double>(ties);
    const double rev = (1.0 - tie_prob(ties - 1, non_ties + 1)) / static_cast<double>(non_ties + 1);
    log_ratio = -lin + std::log(rev / fwd);
  } else {
    const double fwd = (1.0 - tie_prob(ties, non_ties)) / static_cast<double>(non_ties);
    const double rev = tie_prob(ties + 1, non_ties - 1) / static_cast<double>(ties + 1);
    log_ratio = lin + std::log(rev / fwd);
  }
  if (log_ratio >= 0.0 || std::log(uniform01(eng_)) < log_ratio) {
    toggle(i, j);
    ++accepted_;
    return true;
  }
  return false;
}

void TntChain::run(const Eigen::VectorXd& theta, long steps) {
  for (long s = 0; s < steps; ++s) step(theta);
}

StatSample tnt_sample(const Network& net0, const Eigen::VectorXd& theta, const ModelSpec& spec,
                      const SamplerConfig& cfg, Network* final_state) {
  if (theta.size() != spec.dim())
    throw ConfigError("theta has " + std::to_string(theta.size()) + " entries, model has " +
                      std::to_string(spec.dim()) + " terms");
  if (cfg.aux_iters < 0 || cfg.thin < 1 || cfg.count < 1 || cfg.chains < 1)
    throw ConfigError("sampler needs aux_iters >= 0, thin >= 1, count >= 1, chains >= 1");
  if (!theta.allFinite()) throw NumericalError("non-finite theta passed to sampler");
  return kernels::parallel::simulate_chains(net0, theta, spec, cfg, final_state);
}

}  // namespace vergm
