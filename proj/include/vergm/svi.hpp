#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "vergm/gaussian.hpp"
#include "vergm/network.hpp"
#include "vergm/sampler.hpp"
#include "vergm/stats.hpp"

namespace vergm {

/// Adam with bias correction, used for ascent.
class Adam {
 public:
  struct Params {
    double step = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
  };

  Adam() = default;
  explicit Adam(Params params) : params_(params) {}

  /// Increment to add to the parameters for gradient `grad`.
  Eigen::VectorXd step(const Eigen::VectorXd& grad);
  long iterations() const { return t_; }
  const Params& params() const { return params_; }

 private:
  Params params_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

struct Particle {
  Eigen::VectorXd theta;
  Eigen::MatrixXd stats;  // K x p
  long inserted_at = 0;   // SVI iteration, 0 for the initial particle
};

/// Particles with simulated statistics, reused for self-normalised
/// importance sampling of E[s(y) | theta].
class ParticleStore {
 public:
  ParticleStore(int K, double ess_threshold) : K_(K), ess_threshold_(ess_threshold) {}

  void add(Particle p);
  int K() const { return K_; }
  double ess_threshold() const { return ess_threshold_; }
  int size() const { return static_cast<int>(particles_.size()); }
  bool empty() const { return particles_.empty(); }
  const Particle& operator[](int u) const { return particles_[static_cast<std::size_t>(u)]; }
  const std::vector<Particle>& particles() const { return particles_; }

  /// Closest particle in the metric (C C^T)^{-1}; ties go to the earliest.
  int nearest(const Eigen::VectorXd& theta, const Eigen::MatrixXd& C) const;

 private:
  int K_;
  double ess_threshold_;
  std::vector<Particle> particles_;
};

struct SnisEstimate {
  Eigen::VectorXd mean;  // empty when refresh is set
  double ess = 0.0;
  int particle = -1;
  bool refresh = false;
};

/// SNIS estimate of E[s(y) | theta] from statistics simulated at theta_u.
/// Never signals a refresh.
SnisEstimate snis_estimate(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta_u, const Eigen::VectorXd& theta);

/// Uses the nearest particle; signals a refresh when ESS < the store's threshold.
SnisEstimate snis_mean_stats(const ParticleStore& store, const Eigen::VectorXd& theta, const Eigen::MatrixXd& C);

/// s(y) - mean_stats - Sigma0^{-1}(theta - mu0)
Eigen::VectorXd grad_logjoint(const Eigen::VectorXd& theta, const Eigen::VectorXd& s_y,
                              const Eigen::VectorXd& mean_stats, const GaussianPrior& prior);

/// Statistics simulated at theta_ML with log z(theta_ML), giving
/// log p(y|theta) ~ theta^T s(y) - log z(theta_ML) - log mean_k exp(s_k^T (theta - theta_ML)).
struct ElboReference {
  Eigen::MatrixXd stats0;
  Eigen::VectorXd theta_ml;
  double log_z_ml = 0.0;
  Eigen::VectorXd s_obs;

  double loglik(const Eigen::VectorXd& theta) const;
};

ElboReference make_elbo_reference(const Network& net, const ModelSpec& spec, const Eigen::VectorXd& theta_ml,
                                  double log_z_ml, int K0, const SamplerConfig& sampler);

/// Single-draw bound estimate at theta = C s + mu using the reference likelihood.
double elbo_hat(const Eigen::VectorXd& theta, const Eigen::VectorXd& s, const GaussianVariational& q,
                const GaussianPrior& prior, const ElboReference& ref);

enum class SviMode {
  MonteCarlo,  // fresh K networks every iteration
  Snis,        // adaptive particle store
  FixedSnis,   // single proposal at theta_ML, never refreshed (diagnostic)
};

struct SviConfig {
  SviMode mode = SviMode::Snis;
  int K = 100;
  double ess_frac = 1.0 / 3.0;
  Adam::Params adam;
  double tol = 1e-5;
  int check_every = 1000;
  long max_iters = 200000;
  std::uint64_t seed = 1;
};

struct SviResult {
  GaussianVariational q;
  std::vector<double> lbar;     // block averages of the bound estimates
  std::vector<double> lhat;     // per-iteration bound estimates
  std::vector<double> ess;      // per iteration; NaN in Monte Carlo mode
  std::vector<char> refreshed;  // per iteration: 1 if networks were simulated
  std::vector<long> particle_iters;
  long iterations = 0;
  bool converged = false;
};

SviResult svi_fit(const Network& net, const ModelSpec& spec, const GaussianPrior& prior,
                  const GaussianVariational& init, const SviConfig& cfg, const SamplerConfig& sampler,
                  const ElboReference& ref);

}  // namespace vergm
