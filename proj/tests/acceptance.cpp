// Acceptance checks. Usage: acceptance [criterion numbers...] (default: all).
// Prints one PASS/FAIL line per criterion plus INFO detail lines, and exits
// non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "util.hpp"
#include "vergm/cli.hpp"
#include "vergm/io.hpp"
#include "vergm/kernels.hpp"
#include "vergm/modelsel.hpp"
#include "vergm/ncvmp.hpp"
#include "vergm/oracle.hpp"
#include "vergm/posterior.hpp"
#include "vergm/reproduce.hpp"
#include "vergm/rng.hpp"
#include "vergm/svi.hpp"

using namespace vergm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

void info(int c, const std::string& msg) { std::cout << "INFO criterion " << c << ": " << msg << std::endl; }

// Max-norm relative error, with the reference's max-norm as the scale.
double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
}

// ---------------------------------------------------------------- 1

bool criterion1() {
  const auto t0 = Clock::now();
  const std::vector<std::vector<std::string>> specs = {{"edges"}, {"edges", "gwesp:0.2"}, {"edges", "gwd:0.8"}};
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> pick_n(3, 5), pick_spec(0, 2);
  int sampler_bad = 0, mle_bad = 0, logz_bad = 0, redraws = 0, redrawn_cases = 0;
  double worst_z = 0.0, worst_mle = 0.0, worst_logz = 0.0;

  for (int c = 0; c < 25; ++c) {
    int n = pick_n(gen);
    ModelSpec spec = ModelSpec::parse(specs[static_cast<std::size_t>(pick_spec(gen))]);
    // Observed graph: drawn while the MLE is infinite. Some (n, spec) pairs
    // have no graph in the interior of the statistic hull (n = 3 with a
    // curved term); those cases are drawn again.
    Network obs;
    Eigen::VectorXd mle;
    for (unsigned r = 0;; ++r) {
      if (r > 0 && r % 200 == 0) {
        n = pick_n(gen);
        spec = ModelSpec::parse(specs[static_cast<std::size_t>(pick_spec(gen))]);
        ++redrawn_cases;
      }
      obs = testutil::random_graph(n, 0.5, 1000u * static_cast<unsigned>(c) + r);
      if (oracles::brute_mle(oracles::brute_table(Network(n), spec), suff_stats(obs, spec), mle)) break;
      ++redraws;
    }
    const int p = spec.dim();
    Eigen::VectorXd theta(p);
    for (int k = 0; k < p; ++k) theta[k] = unif(gen);
    const Eigen::MatrixXd table = oracles::brute_table(Network(n), spec);
    const oracles::Exact ex = oracles::brute_moments(table, theta);
    const OracleResult lib = enumerate_oracle(n, theta, spec);
    if (std::abs(lib.log_z - ex.log_z) > 1e-10) {
      info(1, "enumerate_oracle disagrees with the brute-force table");
      return false;
    }

    // Sampler mean against the exact mean.
    const SamplerConfig sc{1000, 50, 4000, 4, derive_seed(1, "c1-sample", static_cast<std::uint64_t>(c))};
    const StatSample S = tnt_sample(Network(n), theta, spec, sc);
    for (int k = 0; k < p; ++k) {
      const double se = std::sqrt(ex.cov(k, k) / sc.count);
      const double z = std::abs(S.mean()[k] - lib.mean[k]) / se;
      worst_z = std::max(worst_z, z);
      if (z > 3.0) ++sampler_bad;
    }

    McmleConfig mc;
    mc.sampler = {1000, 50, 5000, 4, derive_seed(1, "c1-mcmle", static_cast<std::uint64_t>(c))};
    mc.final_factor = 20;
    const McmleResult fit = mcmc_mle(obs, spec, Eigen::VectorXd::Zero(p), mc);
    const double dm = (fit.theta - mle).cwiseAbs().maxCoeff();
    worst_mle = std::max(worst_mle, dm);
    if (dm > 0.05) {
      ++mle_bad;
      info(1, "case " + std::to_string(c) + " mcmc_mle off by " + fmt(dm));
    }

    TemperSchedule ts;
    ts.J = 20;
    ts.K = 500;
    ts.aux_iters = 500;
    ts.thin = 20;
    ts.seed = derive_seed(1, "c1-temper", static_cast<std::uint64_t>(c));
    const double dz = std::abs(log_z_tempered(obs, spec, theta, ts) - ex.log_z);
    worst_logz = std::max(worst_logz, dz);
    if (dz > 0.05) ++logz_bad;
    if (std::getenv("VERGM_ACCEPT_VERBOSE"))
      info(1, "case " + std::to_string(c) + " n=" + std::to_string(n) + " p=" + std::to_string(p) + " rounds " +
                  std::to_string(fit.rounds) + " t=" + fmt(seconds_since(t0), 3));
  }
  const double secs = seconds_since(t0);
  info(1, "worst sampler |z| " + fmt(worst_z) + ", worst MLE error " + fmt(worst_mle) + ", worst log z error " +
              fmt(worst_logz) + ", graphs redrawn for an infinite MLE " + std::to_string(redraws) +
              ", cases redrawn " + std::to_string(redrawn_cases) + ", " +
              fmt(secs, 3) + " s");
  info(1, "failures: sampler " + std::to_string(sampler_bad) + ", mcmc_mle " + std::to_string(mle_bad) +
              ", log z " + std::to_string(logz_bad));
  return sampler_bad == 0 && mle_bad == 0 && logz_bad == 0 && secs < 60.0;
}

// ---------------------------------------------------------------- 2

bool criterion2() {
  const auto t0 = Clock::now();
  const GaussHermite gh;
  double worst = 0.0;
  for (int i = 0; i < 21; ++i) {
    const double m = -5.0 + 0.5 * i;
    for (int j = 0; j < 11; ++j) {
      const double v = 0.05 + (3.0 - 0.05) * j / 10.0;
      for (int r = 0; r < 3; ++r) {
        const double ref = oracles::dense_b_moment(r, m, v);
        worst = std::max(worst, std::abs(b_moment(r, m, v, gh) - ref) / std::abs(ref));
      }
    }
  }
  const double secs = seconds_since(t0);
  info(2, "worst relative error " + fmt(worst) + " over 693 values, " + fmt(secs, 3) + " s");
  return worst <= 1e-8 && secs < 5.0;
}

// ---------------------------------------------------------------- 3

bool criterion3() {
  const auto t0 = Clock::now();
  const double h = 1e-5;
  std::mt19937_64 gen(33);
  std::normal_distribution<double> z;
  double worst_pl = 0.0, worst_q = 0.0;
  for (const KarateModel& m : karate_models()) {
    const AdjustedPL a = testutil::cheap_karate(m.terms);
    const int p = a.dim();
    for (int pt = 0; pt < 10; ++pt) {
      Eigen::VectorXd t(p);
      for (int k = 0; k < p; ++k) t[k] = a.theta_ml[k] + 0.3 * z(gen);
      const LogPLEval f = adjusted_logpl(a, t);
      Eigen::VectorXd g(p);
      Eigen::MatrixXd H(p, p);
      for (int k = 0; k < p; ++k) {
        Eigen::VectorXd tp = t, tm = t;
        tp[k] += h;
        tm[k] -= h;
        const LogPLEval fp = adjusted_logpl(a, tp), fm = adjusted_logpl(a, tm);
        g[k] = (fp.value - fm.value) / (2 * h);
        H.col(k) = (fp.grad - fm.grad) / (2 * h);
      }
      worst_pl = std::max({worst_pl, rel_err(f.grad, g), rel_err(f.hess, H)});

      // Gaussian q around the same point.
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
      for (int i = 0; i < p; ++i) {
        C(i, i) = 0.1 + 0.5 * std::abs(z(gen));
        for (int j = 0; j < i; ++j) C(i, j) = 0.2 * z(gen);
      }
      const GaussianVariational q(a.theta_ml, C);
      Eigen::VectorXd gt(p);
      for (int k = 0; k < p; ++k) {
        Eigen::VectorXd tp = t, tm = t;
        tp[k] += h;
        tm[k] -= h;
        gt[k] = (q.log_q(tp) - q.log_q(tm)) / (2 * h);
      }
      const Eigen::VectorXd c = vech(C);
      Eigen::VectorXd gc(c.size());
      for (Eigen::Index k = 0; k < c.size(); ++k) {
        Eigen::VectorXd cp = c, cm = c;
        cp[k] += h;
        cm[k] -= h;
        gc[k] = (GaussianVariational(q.mu, unvech(cp, p)).log_q(t) - GaussianVariational(q.mu, unvech(cm, p)).log_q(t)) /
                (2 * h);
      }
      worst_q = std::max({worst_q, rel_err(q.grad_theta_log_q(t), gt), rel_err(q.grad_vech_log_q(t), gc)});
    }
  }
  const double secs = seconds_since(t0);
  info(3, "worst relative error: adjusted log-PL " + fmt(worst_pl) + ", log q " + fmt(worst_q) + ", " +
              fmt(secs, 3) + " s");
  return worst_pl <= 1e-6 && worst_q <= 1e-6 && secs < 5.0;
}

// ---------------------------------------------------------------- 4

bool criterion4() {
  const auto t0 = Clock::now();
  const ModelSpec e = ModelSpec::parse({"edges"});
  const Network net = testutil::four_with_three();
  const double prior_var = 100.0;
  const GaussianPrior prior = GaussianPrior::isotropic(1, prior_var);
  const Eigen::VectorXd s_obs = suff_stats(net, e);

  // Exact posterior on a grid, with log z from enumeration.
  const ExactErgm exact(Network(4), e);
  const int points = 24001;
  const double lo = -12.0, hi = 12.0, step = (hi - lo) / (points - 1);
  std::vector<double> grid(points), logp(points);
  double mx = -INFINITY;
  for (int k = 0; k < points; ++k) {
    grid[k] = lo + k * step;
    const Eigen::VectorXd t = Eigen::VectorXd::Constant(1, grid[k]);
    logp[k] = exact.log_lik(t, s_obs) + prior.log_density(t);
    mx = std::max(mx, logp[k]);
  }
  std::vector<double> dens(points);
  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < points; ++k) {
    dens[k] = std::exp(logp[k] - mx);
    const double w = (k == 0 || k == points - 1) ? 0.5 * step : step;
    mass += w * dens[k];
    m1 += w * dens[k] * grid[k];
    m2 += w * dens[k] * grid[k] * grid[k];
  }
  for (double& d : dens) d /= mass;
  const double mean = m1 / mass, sd = std::sqrt(m2 / mass - mean * mean);
  const oracles::GridPosterior closed = oracles::edges_posterior(6, 3, prior_var);
  info(4, "grid posterior mean " + fmt(mean, 6) + ", sd " + fmt(sd, 6) + " (closed form " + fmt(closed.mean, 6) +
              ", " + fmt(closed.sd, 6) + ")");

  bool ok = std::abs(mean - closed.mean) < 1e-6 && std::abs(sd - closed.sd) < 1e-6;
  auto judge = [&](const std::string& name, double m, double s) {
    const bool good = std::abs(m - mean) < 0.05 && std::abs(s / sd - 1.0) < 0.10;
    info(4, name + ": mean " + fmt(m, 5) + ", sd " + fmt(s, 5) + (good ? "" : "  <-- outside tolerance"));
    ok = ok && good;
  };

  const AdjustedPL apl = build_adjusted_pl_exact(net, e);
  const NcvmpResult nc = ncvmp_fit(apl, prior, ncvmp_default_init(apl));
  judge("ncvmp", nc.q.mu[0], nc.q.sd()[0]);
  const GaussianVariational lap = laplace_fit(apl, prior);
  judge("laplace", lap.mu[0], lap.sd()[0]);

  const SamplerConfig sampler{500, 20, 1, 1, 1};
  SamplerConfig rs = sampler;
  rs.seed = derive_seed(4, "c4-elbo-ref");
  const ElboReference ref = make_elbo_reference(net, e, apl.theta_ml, apl.log_z_ml, 1000, rs);
  const GaussianVariational init(apl.theta_ml, Eigen::MatrixXd::Constant(1, 1, 0.1));
  for (const auto& [name, mode, K] : std::vector<std::tuple<std::string, SviMode, int>>{
           {"svi-a (K=5)", SviMode::MonteCarlo, 5}, {"svi-b (K=100)", SviMode::Snis, 100}}) {
    SviConfig cfg;
    cfg.mode = mode;
    cfg.K = K;
    cfg.seed = derive_seed(4, name);
    const SviResult r = svi_fit(net, e, prior, init, cfg, sampler, ref);
    judge(name, r.q.mu[0], r.q.sd()[0]);
  }

  ExchangeConfig xc;
  xc.iters = 105000;
  xc.burnin = 5000;
  xc.sigma_eps = 1.0;
  xc.aux_iters = 500;
  xc.seed = derive_seed(4, "c4-exchange");
  const McmcChain ch = exchange_sample(net, e, prior, Eigen::VectorXd::Zero(1), xc);
  const Eigen::VectorXd d = ch.draws.col(0);
  const double xm = d.mean(), xs = std::sqrt((d.array() - xm).square().sum() / (d.size() - 1));
  judge("exchange", xm, xs);
  std::vector<double> draws(d.data(), d.data() + d.size());
  const double kl = marginal_kl(Marginal::from_samples(draws), Marginal::tabulated(grid, dens));
  info(4, "exchange: " + std::to_string(d.size()) + " draws, acceptance " + fmt(ch.acceptance_rate, 3) +
              ", marginal KL vs grid " + fmt(kl));
  ok = ok && kl < 0.01;
  const double secs = seconds_since(t0);
  info(4, fmt(secs, 3) + " s");
  return ok && secs < 180.0;
}

// ---------------------------------------------------------------- 5

const std::vector<std::string> kRanking = {"M1", "M3", "M2"};

bool criterion5() {
  const auto t0 = Clock::now();
  const Network net = testutil::karate();
  bool values_ok = true, ranking_ok = true;
  std::vector<ModelRun> first;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ReproduceConfig cfg;
    cfg.seed = seed;
    const std::vector<ModelRun> runs = reproduce_karate(net, cfg);
    for (const ModelRun& r : runs) {
      std::ostringstream line;
      line << "seed " << seed << " " << r.model.name << ":";
      for (const MethodRow& row : r.rows) {
        const double pub = row.path == 1 ? r.model.published_path1 : r.model.published_path2;
        const double tol = row.path == 1 ? cfg.tol_path1 : cfg.tol_path2;
        const bool good = std::abs(row.iw.value - pub) <= tol;
        values_ok = values_ok && good;
        line << " " << row.method << " " << fmt(row.iw.value, 6) << " (" << fmt(pub, 5) << ")" << (good ? "" : "*");
      }
      info(5, line.str());
    }
    // Ranking by every method, not only the headline one.
    for (std::size_t m = 0; m < runs.front().rows.size(); ++m) {
      std::vector<std::pair<double, std::string>> v;
      for (const ModelRun& r : runs) v.emplace_back(r.rows[m].iw.value, r.model.name);
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      std::vector<std::string> order;
      for (const auto& x : v) order.push_back(x.second);
      if (order != kRanking) {
        ranking_ok = false;
        info(5, "seed " + std::to_string(seed) + " " + runs.front().rows[m].method + " ranking " + order[0] + " > " +
                    order[1] + " > " + order[2]);
      }
    }
    if (seed == 1) first = runs;
  }
  info(5, "values marked * are outside the tolerance (path I +-0.3, path II +-0.5)");
  info(5, std::string("ranking M1 > M3 > M2 for every method and seed: ") + (ranking_ok ? "yes" : "no"));

  // Independent evidence of the adjusted-PL posterior by brute-force
  // integration on a whitened grid (seed 1 adjustments).
  bool desk_ok = true;
  for (const ModelRun& r : first) {
    const GaussianPrior prior = GaussianPrior::isotropic(r.spec.dim());
    const AdjustedPL& a = r.apl;
    const auto f = [&a, &prior](const Eigen::VectorXd& t) {
      return a.log_M + kernels::serial::logpl_value(a.terms(), t) + prior.log_density(t);
    };
    const GaussianVariational lap = laplace_fit(a, prior);
    const Eigen::MatrixXd L = lap.C;
    const double desk = oracles::grid_log_integral(f, lap.mu, L, 8.0, r.spec.dim() == 3 ? 0.25 : 0.1);
    const double ncvmp_iw = r.rows.front().iw.value;
    const bool good = std::abs(ncvmp_iw - desk) <= 0.5;
    desk_ok = desk_ok && good;
    info(5, r.model.name + " path-I grid evidence " + fmt(desk, 6) + ", NCVMP IWLB " + fmt(ncvmp_iw, 6) +
                (good ? "" : "  <-- differs by more than 0.5"));
  }
  info(5, std::string("degraded form (grid desk check within 0.5 and ranking): ") +
              (desk_ok && ranking_ok ? "holds" : "does not hold"));
  const double secs = seconds_since(t0);
  info(5, fmt(secs, 4) + " s");
  return values_ok && ranking_ok && secs < 900.0;
}

// ---------------------------------------------------------------- 6

// SVI (b) exactly as in the reproduction run (same seeds and settings).
struct SviB {
  AdjustedPL apl;
  ElboReference ref;
  GaussianVariational init;
  SviResult res;
};

SviB svi_b_run(const Network& net, const KarateModel& m, std::uint64_t seed, const SviConfig* override_cfg = nullptr) {
  ReproduceConfig cfg;
  cfg.seed = seed;
  const ModelSpec spec = ModelSpec::parse(m.terms);
  const GaussianPrior prior = GaussianPrior::isotropic(spec.dim());
  const std::uint64_t root = derive_seed(seed, m.name);
  const SamplerConfig sampler = reproduce_sampler(cfg);
  SviB out;
  out.apl = build_adjusted_pl(net, spec, reproduce_adjust_config(cfg, m.name));
  out.init = ncvmp_fit(out.apl, prior, ncvmp_default_init(out.apl)).q;
  SamplerConfig rs = sampler;
  rs.seed = derive_seed(root, "elbo-ref");
  out.ref = make_elbo_reference(net, spec, out.apl.theta_ml, out.apl.log_z_ml, cfg.K0, rs);
  SviConfig vb;
  vb.mode = SviMode::Snis;
  vb.K = cfg.svi_b_K;
  vb.seed = derive_seed(root, "svi-b");
  if (override_cfg) vb = *override_cfg;
  out.res = svi_fit(net, spec, prior, out.init, vb, sampler, out.ref);
  return out;
}

double late_refresh_fraction(const SviResult& r, long after) {
  long n = 0, refreshed = 0;
  for (std::size_t t = static_cast<std::size_t>(after); t < r.refreshed.size(); ++t) {
    ++n;
    refreshed += r.refreshed[t];
  }
  return n ? static_cast<double>(refreshed) / n : 0.0;
}

bool criterion6() {
  const auto t0 = Clock::now();
  const Network net = testutil::karate();
  bool ok = true;
  for (const KarateModel& m : karate_models()) {
    if (m.name == "M3") continue;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SviB run = svi_b_run(net, m, seed);
      const std::size_t particles = run.res.particle_iters.size();
      const double snis = 1.0 - late_refresh_fraction(run.res, 1000);
      const bool good = particles >= 15 && particles <= 60 && snis > 0.8;
      ok = ok && good;
      info(6, m.name + " seed " + std::to_string(seed) + ": " + std::to_string(run.res.iterations) + " iterations, " +
                  std::to_string(particles) + " particles, SNIS without refresh after 1000: " + fmt(100 * snis, 4) +
                  "%" + (good ? "" : "  <-- outside"));
    }
  }
  const double secs = seconds_since(t0);
  info(6, fmt(secs, 4) + " s");
  return ok && secs < 300.0;
}

// ---------------------------------------------------------------- 7

bool criterion7() {
  const auto t0 = Clock::now();
  const Network net = testutil::karate();
  const KarateModel& m2 = karate_models()[1];
  // Fixed proposal: 10^4 networks at theta_ML, 7000 iterations, never refreshed.
  SviConfig fixed;
  fixed.mode = SviMode::FixedSnis;
  fixed.K = 10000;
  fixed.tol = -INFINITY;
  fixed.max_iters = 7000;
  fixed.seed = derive_seed(1, "c7-fixed");
  const SviB f = svi_b_run(net, m2, 1, &fixed);
  long low = 0;
  for (double e : f.res.ess) low += e < fixed.K / 3.0;
  const double frac_fixed = static_cast<double>(low) / static_cast<double>(f.res.ess.size());
  info(7, "fixed proposal: ESS < K/3 on " + std::to_string(low) + " of " + std::to_string(f.res.ess.size()) +
              " iterations (" + fmt(100 * frac_fixed, 3) + "%)");

  const SviB a = svi_b_run(net, m2, 1);
  const double frac_adaptive = late_refresh_fraction(a.res, 1000);
  info(7, "adaptive store: ESS < K/3 on " + fmt(100 * frac_adaptive, 3) + "% of iterations after 1000 (" +
              std::to_string(a.res.iterations) + " iterations, " + std::to_string(a.res.particle_iters.size()) +
              " particles)");
  const double secs = seconds_since(t0);
  info(7, fmt(secs, 4) + " s");
  return frac_fixed > 0.4 && frac_adaptive < 0.1;
}

// ---------------------------------------------------------------- 8

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The parts of a manifest that must not change between runs.
nlohmann::json manifest_core(const fs::path& p, bool with_config) {
  const nlohmann::json m = nlohmann::json::parse(slurp(p));
  nlohmann::json core;
  core["outputs"] = m.at("outputs");
  core["results"] = m.at("results");
  core["seeds"] = m.at("seeds");
  core["subcommand"] = m.at("subcommand");
  std::vector<std::string> hashes;
  for (const auto& [k, v] : m.at("inputs").items()) hashes.push_back(v.get<std::string>());
  core["inputs"] = hashes;
  if (with_config) {
    // Paths name the run directory; drop the lines that carry them.
    std::istringstream cfg(m.at("config").get<std::string>());
    std::string line, kept;
    while (std::getline(cfg, line))
      if (line.find('/') == std::string::npos) kept += line + "\n";
    core["config"] = kept;
  }
  return core;
}

// Runs the whole command sequence into `dir`; returns the failing command or "".
std::string run_all(const fs::path& dir, const std::string& workers) {
  const std::string karate = testutil::karate_path().string();
  const std::string out = dir.string();
  const std::vector<std::string> g = {"--network", karate, "--nodes", "34", "--terms", "edges,gwesp:0.2",
                                      "--seed", "5", "--out", out, "--workers", workers};
  auto file = [&](const std::string& f) { return (dir / f).string(); };
  const std::vector<std::vector<std::string>> cmds = {
      {"simulate", "--theta=-2.5,0.8", "--aux-iters", "2000", "--thin", "100", "--count", "50", "--chains", "3"},
      {"mple"},
      {"dump-changestats"},
      {"mcmle", "--aux-iters", "2000", "--thin", "100", "--count", "300", "--max-rounds", "5"},
      {"adjust", "--temps", "5", "--rung-samples", "100", "--count", "300", "--aux-iters", "3000", "--thin", "200"},
      {"fit-ncvmp", "--adjust-cache", file("adjust.json")},
      {"fit-laplace", "--adjust-cache", file("adjust.json")},
      {"fit-svi", "--adjust-cache", file("adjust.json"), "--mode", "snis", "--K", "50", "--K0", "200", "--max-iters",
       "3000", "--aux-iters", "2000", "--thin", "100"},
      {"fit-exchange", "--iters", "600", "--burnin", "100", "--aux-iters", "2000"},
      {"iwlb", "--posterior", file("ncvmp_posterior.csv"), "--adjust-cache", file("adjust.json"), "--label", "p1",
       "--N", "100", "--J", "20"},
      {"iwlb", "--posterior", file("svi_posterior.csv"), "--path", "II", "--elbo-ref", file("elbo_ref.json"),
       "--label", "p2", "--N", "100", "--J", "20"},
      {"compare", file("iwlb-p1.csv"), file("iwlb-p2.csv")},
      {"kl-compare", "--a", file("ncvmp_posterior.csv"), "--b", file("exchange_draws.csv")},
  };
  for (const auto& c : cmds) {
    std::vector<std::string> args = g;
    args.insert(args.end(), c.begin(), c.end());
    std::ostringstream o, e;
    if (cli::dispatch(args, o, e) != 0) return c.front() + ": " + e.str();
  }
  // Tiny node set for the oracle, and the quick karate reproduction.
  std::ostringstream o, e;
  if (cli::dispatch({"--nodes", "4", "--terms", "edges,gwd:0.8", "--out", out, "--workers", workers, "oracle",
                     "--theta=0.3,-0.2"},
                    o, e) != 0)
    return "oracle: " + e.str();
  if (cli::dispatch({"--network", karate, "--nodes", "34", "--seed", "2", "--out", out, "--workers", workers,
                     "reproduce-karate", "--quick"},
                    o, e) != 0)
    return "reproduce-karate: " + e.str();
  return "";
}

bool criterion8() {
  const auto t0 = Clock::now();
  const fs::path root = fs::temp_directory_path() / "vergm-acceptance-8";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> runs = {{"a", "2"}, {"b", "2"}, {"c", "5"}};
  for (const auto& [name, workers] : runs) {
    fs::create_directories(root / name);
    const std::string bad = run_all(root / name, workers);
    if (!bad.empty()) {
      info(8, "run " + name + " failed in " + bad);
      return false;
    }
  }
  bool ok = true;
  std::set<std::string> subcommands;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const std::string f = entry.path().filename().string();
    const bool manifest = f.size() > 14 && f.substr(f.size() - 14) == ".manifest.json";
    for (const std::string other : {"b", "c"}) {
      const fs::path q = root / other / f;
      if (!fs::exists(q)) {
        info(8, f + " missing from run " + other);
        ok = false;
        continue;
      }
      bool same;
      if (manifest)
        same = manifest_core(entry.path(), other == "b") == manifest_core(q, other == "b");
      else
        same = slurp(entry.path()) == slurp(q);
      if (!same) {
        info(8, f + " differs between run a and run " + other + (other == "c" ? " (other --workers)" : ""));
        ok = false;
      }
    }
    if (manifest) subcommands.insert(f.substr(0, f.size() - 14));
    ++files;
  }
  std::string list;
  for (const auto& s : subcommands) list += (list.empty() ? "" : " ") + s;
  info(8, std::to_string(files) + " files compared across three runs (workers 2, 2, 5); subcommands: " + list);
  info(8, fmt(seconds_since(t0), 4) + " s");
  return ok && subcommands.size() == 14;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<bool()>>> all = {
      {1, {"oracle equivalence on small graphs", criterion1}},
      {2, {"quadrature accuracy", criterion2}},
      {3, {"gradient checks", criterion3}},
      {4, {"exact-posterior recovery on the edges-only toy", criterion4}},
      {5, {"karate IWLB reproduction", criterion5}},
      {6, {"SVI (b) particle economy", criterion6}},
      {7, {"SNIS degradation with a fixed proposal", criterion7}},
      {8, {"determinism", criterion8}},
  };
  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.push_back(std::stoi(argv[i]));
  if (chosen.empty())
    for (const auto& [k, v] : all) chosen.push_back(k);
  bool all_ok = true;
  for (int c : chosen) {
    const auto it = all.find(c);
    if (it == all.end()) {
      std::cerr << "no criterion " << c << "\n";
      return 2;
    }
    bool ok = false;
    try {
      ok = it->second.second();
    } catch (const std::exception& e) {
      info(c, std::string("exception: ") + e.what());
    }
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c << " " << it->second.first << std::endl;
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
