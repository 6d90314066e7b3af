// Serial reference kernels against their OpenMP versions.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "util.hpp"
#include "vergm/gaussian.hpp"
#include "vergm/kernels.hpp"
#include "vergm/quadrature.hpp"

using namespace vergm;

namespace {

// Dyad terms of a 3-parameter model on a 300-node graph (44850 dyads).
struct Dyads {
  Eigen::VectorXd alpha, y;
  Eigen::MatrixXd beta;
  Dyads() {
    const long m = 300L * 299 / 2;
    std::mt19937_64 gen(7);
    std::normal_distribution<double> z;
    alpha.resize(m);
    y.resize(m);
    beta.resize(m, 3);
    for (long k = 0; k < m; ++k) {
      alpha[k] = -2.0 + 0.3 * z(gen);
      for (int j = 0; j < 3; ++j) beta(k, j) = j == 0 ? 1.0 : std::abs(z(gen));
      y[k] = z(gen) > 1.0;
    }
  }
  kernels::DyadTerms terms() const { return {alpha, beta, y}; }
};

const Dyads& dyads() {
  static const Dyads d;
  return d;
}

Eigen::VectorXd theta3() { return Eigen::Vector3d(-0.5, 0.2, -0.1); }

template <bool Parallel>
void BM_logpl_sums(benchmark::State& st) {
  const auto d = dyads().terms();
  const Eigen::VectorXd t = theta3();
  for (auto _ : st) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(kernels::parallel::logpl_sums(d, t));
    else
      benchmark::DoNotOptimize(kernels::serial::logpl_sums(d, t));
  }
}

template <bool Parallel>
void BM_expected_sums(benchmark::State& st) {
  const auto d = dyads().terms();
  const Eigen::VectorXd mu = theta3();
  const Eigen::MatrixXd sigma = 0.01 * Eigen::MatrixXd::Identity(3, 3);
  const GaussHermite gh;
  for (auto _ : st) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(kernels::parallel::expected_sums(d, mu, sigma, gh));
    else
      benchmark::DoNotOptimize(kernels::serial::expected_sums(d, mu, sigma, gh));
  }
}

template <bool Parallel>
void BM_log_mean_exp_shifts(benchmark::State& st) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  Eigen::MatrixXd S(1000, 3), D(3, 512);
  for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = 50.0 + 10.0 * z(gen);
  for (Eigen::Index i = 0; i < D.size(); ++i) D.data()[i] = 0.05 * z(gen);
  for (auto _ : st) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(kernels::parallel::log_mean_exp_shifts(S, D));
    else
      benchmark::DoNotOptimize(kernels::serial::log_mean_exp_shifts(S, D));
  }
}

template <bool Parallel>
void BM_iw_accumulate(benchmark::State& st) {
  const auto d = dyads().terms();
  const GaussianVariational q(theta3(), 0.05 * Eigen::MatrixXd::Identity(3, 3));
  const kernels::LogJoint f = [&d](const Eigen::VectorXd& t) { return kernels::serial::logpl_value(d, t); };
  for (auto _ : st) {
    Eigen::VectorXd log_sum = Eigen::VectorXd::Constant(64, -INFINITY);
    if constexpr (Parallel)
      kernels::parallel::iw_accumulate(q, f, 1, 0, 2, log_sum);
    else
      kernels::serial::iw_accumulate(q, f, 1, 0, 2, log_sum);
    benchmark::DoNotOptimize(log_sum);
  }
}

template <bool Parallel>
void BM_simulate_chains(benchmark::State& st) {
  const Network net = testutil::karate();
  const ModelSpec spec = ModelSpec::parse({"edges", "gwesp:0.2", "gwd:0.8"});
  const Eigen::VectorXd t = Eigen::Vector3d(-3.0, 0.8, 0.5);
  const SamplerConfig cfg{5000, 200, 200, 8, 11};
  for (auto _ : st) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(kernels::parallel::simulate_chains(net, t, spec, cfg, nullptr));
    else
      benchmark::DoNotOptimize(kernels::serial::simulate_chains(net, t, spec, cfg, nullptr));
  }
}

}  // namespace

BENCHMARK(BM_logpl_sums<false>)->Name("logpl_sums/serial")->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_logpl_sums<true>)->Name("logpl_sums/parallel")->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_expected_sums<false>)->Name("expected_sums/serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_expected_sums<true>)->Name("expected_sums/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_log_mean_exp_shifts<false>)->Name("log_mean_exp_shifts/serial")->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_log_mean_exp_shifts<true>)->Name("log_mean_exp_shifts/parallel")->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_iw_accumulate<false>)->Name("iw_accumulate/serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_iw_accumulate<true>)->Name("iw_accumulate/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_simulate_chains<false>)->Name("simulate_chains/serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_simulate_chains<true>)->Name("simulate_chains/parallel")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
