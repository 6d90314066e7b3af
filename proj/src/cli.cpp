#include "vergm/cli.hpp"

#include <omp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vergm/error.hpp"
#include "vergm/io.hpp"
#include "vergm/modelsel.hpp"
#include "vergm/ncvmp.hpp"
#include "vergm/oracle.hpp"
#include "vergm/posterior.hpp"
#include "vergm/pseudo.hpp"
#include "vergm/reproduce.hpp"
#include "vergm/sampler.hpp"
#include "vergm/svi.hpp"

#ifndef VERGM_DATA_DIR
#define VERGM_DATA_DIR "data"
#endif

namespace vergm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad or missing flag detected after parsing; maps to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string network;
  int nodes = 0;
  std::vector<std::string> attrs;
  std::vector<std::string> terms;
  std::uint64_t seed = 1;
  std::string out = "out";
  int workers = 0;
  double prior_var = 100.0;
};

/// Collects what goes into the run manifest.
class Run {
 public:
  Run(std::string subcommand, const Globals& g, std::ostream& out)
      : sub_(std::move(subcommand)), g_(g), out_(out), start_(std::chrono::steady_clock::now()) {}

  std::ostream& out() { return out_; }
  const Globals& globals() const { return g_; }
  fs::path file(const std::string& name) const { return fs::path(g_.out) / name; }

  void input(const fs::path& p) { inputs_[p.string()] = file_hash(p); }
  void output(const fs::path& p) { outputs_.push_back(p); }
  void stream(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }
  json& results() { return results_; }

  void finish(const std::string& config) {
    json m;
    m["subcommand"] = sub_;
    m["version"] = kVersion;
    m["data_format"] = kDataFormat;
    m["config"] = config;
    json seeds;
    seeds["root"] = g_.seed;
    for (const auto& [k, v] : seeds_) seeds[k] = v;
    m["seeds"] = seeds;
    m["inputs"] = inputs_;
    json outs = json::object();
    for (const fs::path& p : outputs_) outs[p.filename().string()] = file_hash(p);
    m["outputs"] = outs;
    m["results"] = results_;
    m["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const fs::path path = file(sub_ + ".manifest.json");
    fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path.string());
    f << m.dump(1) << '\n';
  }

 private:
  std::string sub_;
  const Globals& g_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::uint64_t> seeds_;
  std::vector<fs::path> outputs_;
  json results_ = json::object();
};

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file: " + path);
}

std::vector<std::pair<std::string, fs::path>> attr_files(Run& run) {
  std::vector<std::pair<std::string, fs::path>> out;
  for (const std::string& a : run.globals().attrs) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) throw UsageError("--attr expects name=path, got " + a);
    const std::string path = a.substr(eq + 1);
    require_file(path, "--attr");
    run.input(path);
    out.emplace_back(a.substr(0, eq), path);
  }
  return out;
}

Network load_input(Run& run) {
  const Globals& g = run.globals();
  require_file(g.network, "--network");
  if (g.nodes <= 0) throw UsageError("--nodes is required");
  auto attrs = attr_files(run);
  run.input(g.network);
  return load_network(g.network, g.nodes, attrs);
}

/// The observed network if given, otherwise an empty one on --nodes nodes.
Network load_or_empty(Run& run) {
  const Globals& g = run.globals();
  if (!g.network.empty()) return load_input(run);
  if (g.nodes <= 0) throw UsageError("--nodes (or --network) is required");
  Network net(g.nodes);
  for (auto& [name, path] : attr_files(run)) net.set_attribute(name, load_attribute(path, g.nodes));
  return net;
}

ModelSpec load_spec(const Globals& g, const Network* net) {
  if (g.terms.empty()) throw UsageError("--terms is required");
  ModelSpec spec;
  try {
    spec = ModelSpec::parse(g.terms);
    if (net) spec.validate(*net);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return spec;
}

AdjustedPL load_cache(Run& run, const std::string& path) {
  require_file(path, "--adjust-cache");
  run.input(path);
  AdjustedPL apl = load_adjusted_pl(path);
  if (!run.globals().terms.empty()) {
    const ModelSpec spec = load_spec(run.globals(), nullptr);
    if (spec_key(spec) != apl.spec)
      throw UsageError("--terms (" + spec_key(spec) + ") do not match the cache (" + apl.spec + ")");
  }
  return apl;
}

std::vector<std::string> cache_names(const AdjustedPL& apl) {
  std::vector<std::string> terms;
  std::stringstream ss(apl.spec);
  std::string t;
  while (std::getline(ss, t, ',')) terms.push_back(t);
  return ModelSpec::parse(terms).names();
}

GaussianPrior prior_for(const Globals& g, int p) { return GaussianPrior::isotropic(p, g.prior_var); }

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd theta_arg(const std::vector<double>& v, int p, const std::string& flag) {
  if (static_cast<int>(v.size()) != p)
    throw UsageError(flag + " needs " + std::to_string(p) + " values, got " + std::to_string(v.size()));
  return to_vector(v);
}

std::string vec_text(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// CSV of string cells, one row per entry.
void write_rows(Run& run, const fs::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  for (std::size_t c = 0; c < header.size(); ++c) f << (c ? "," : "") << header[c];
  f << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) f << (c ? "," : "") << r[c];
    f << '\n';
  }
  f.close();
  run.output(path);
}

void write_table(Run& run, const std::string& name, const std::vector<std::string>& header, const Eigen::MatrixXd& m) {
  const fs::path path = run.file(name);
  write_table_csv(path, header, m);
  run.output(path);
}

void write_posterior(Run& run, const std::string& name, const std::vector<std::string>& names,
                     const GaussianVariational& q) {
  const fs::path path = run.file(name);
  write_posterior_csv(path, names, q);
  run.output(path);
}

void write_estimate(Run& run, const std::string& name, const std::vector<std::string>& names, const Eigen::VectorXd& v) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < names.size(); ++k) rows.push_back({names[k], format_double(v[static_cast<Eigen::Index>(k)])});
  write_rows(run, run.file(name), {"param", "estimate"}, rows);
}

void print_posterior(std::ostream& out, const std::vector<std::string>& names, const GaussianVariational& q) {
  const Eigen::VectorXd sd = q.sd();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out << "  " << std::left << std::setw(14) << names[k] << " mean " << std::setw(22) << format_double(q.mu[i])
        << " sd " << format_double(sd[i]) << '\n';
  }
}

std::vector<std::vector<std::string>> read_rows(const std::string& path, std::vector<std::string>& header) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (first) {
      header = cells;
      first = false;
    } else {
      if (cells.size() != header.size()) throw ParseError(path, static_cast<long>(rows.size()) + 2, "wrong number of columns");
      rows.push_back(cells);
    }
  }
  if (first) throw ParseError(path, 1, "missing header");
  return rows;
}

// ---------------------------------------------------------------- subcommands

struct SimulateOpts {
  std::vector<double> theta;
  long aux_iters = 30000, thin = 1000;
  int count = 100, chains = 1;
};

void run_simulate(Run& run, const SimulateOpts& o) {
  const Network net = load_or_empty(run);
  const ModelSpec spec = load_spec(run.globals(), &net);
  const Eigen::VectorXd theta = theta_arg(o.theta, spec.dim(), "--theta");
  if (o.count < 1 || o.chains < 1 || o.aux_iters < 0 || o.thin < 1) throw UsageError("sampler sizes must be positive");
  SamplerConfig sc{o.aux_iters, o.thin, o.count, o.chains, derive_seed(run.globals().seed, "simulate")};
  run.stream("simulate", sc.seed);
  const StatSample s = tnt_sample(net, theta, spec, sc);
  write_table(run, "simulate.csv", spec.names(), s.stats);
  run.out() << "mean statistics: " << vec_text(s.mean()) << '\n';
  run.results()["mean"] = vec_json(s.mean());
}

void run_mple(Run& run) {
  const Network net = load_input(run);
  const ModelSpec spec = load_spec(run.globals(), &net);
  const Eigen::VectorXd th = mple(net, spec);
  write_estimate(run, "mple.csv", spec.names(), th);
  run.out() << "mple: " << vec_text(th) << '\n';
  run.results()["mple"] = vec_json(th);
}

struct McmleOpts {
  std::vector<double> theta0;
  long aux_iters = 30000, thin = 1000;
  int count = 1000, max_rounds = 40;
  double tol = 1e-4;
};

void run_mcmle(Run& run, const McmleOpts& o) {
  const Network net = load_input(run);
  const ModelSpec spec = load_spec(run.globals(), &net);
  const Eigen::VectorXd start = o.theta0.empty() ? mple(net, spec) : theta_arg(o.theta0, spec.dim(), "--theta0");
  McmleConfig mc;
  mc.sampler = {o.aux_iters, o.thin, o.count, 1, derive_seed(run.globals().seed, "mcmle")};
  mc.max_rounds = o.max_rounds;
  mc.tol = o.tol;
  run.stream("mcmle", mc.sampler.seed);
  const McmleResult r = mcmc_mle(net, spec, start, mc);
  write_estimate(run, "mcmle.csv", spec.names(), r.theta);
  run.out() << "mcmle: " << vec_text(r.theta) << " (" << r.rounds << " rounds" << (r.converged ? "" : ", not converged")
            << ")\n";
  run.results()["theta"] = vec_json(r.theta);
  run.results()["rounds"] = r.rounds;
  run.results()["converged"] = r.converged;
}

struct AdjustOpts {
  int temps = 20, rung_samples = 500, count = 1000;
  long aux_iters = 30000, thin = 1000;
  bool unmodified = false, exact = false;
};

void run_adjust(Run& run, const AdjustOpts& o) {
  const Network net = load_input(run);
  const ModelSpec spec = load_spec(run.globals(), &net);
  AdjustedPL apl;
  if (o.exact) {
    apl = build_adjusted_pl_exact(net, spec);
  } else {
    AdjustConfig cfg;
    cfg.seed = run.globals().seed;
    cfg.mcmle.sampler = {o.aux_iters, o.thin, o.count, 1, 1};
    cfg.cov_sampler = {o.aux_iters, o.thin, o.count, 1, 1};
    cfg.temper.J = o.temps;
    cfg.temper.K = o.rung_samples;
    cfg.temper.aux_iters = o.aux_iters;
    cfg.temper.thin = o.thin;
    cfg.temper.modified = !o.unmodified;
    for (const char* s : {"adjust-mcmle", "adjust-cov", "adjust-temper"}) run.stream(s, derive_seed(cfg.seed, s));
    apl = build_adjusted_pl(net, spec, cfg);
  }
  const fs::path path = run.file("adjust.json");
  save_adjusted_pl(path, apl);
  run.output(path);
  std::ostream& out = run.out();
  out << "theta_pl: " << vec_text(apl.theta_pl) << '\n'
      << "theta_ml: " << vec_text(apl.theta_ml) << '\n'
      << "log z(theta_ml): " << format_double(apl.log_z_ml) << '\n'
      << "log M: " << format_double(apl.log_M) << '\n';
  run.results()["theta_ml"] = vec_json(apl.theta_ml);
  run.results()["log_z_ml"] = apl.log_z_ml;
  run.results()["log_M"] = apl.log_M;
}

struct NcvmpOpts {
  std::string cache;
  double tol = 1e-5;
  int max_iters = 500, quad_order = 80;
};

void run_ncvmp(Run& run, const NcvmpOpts& o) {
  const AdjustedPL apl = load_cache(run, o.cache);
  const auto names = cache_names(apl);
  NcvmpConfig cfg;
  cfg.tol = o.tol;
  cfg.max_iters = o.max_iters;
  cfg.quad_order = o.quad_order;
  const NcvmpResult r = ncvmp_fit(apl, prior_for(run.globals(), apl.dim()), ncvmp_default_init(apl), cfg);
  write_posterior(run, "ncvmp_posterior.csv", names, r.q);
  Eigen::MatrixXd tr(static_cast<Eigen::Index>(r.trace.size()), 3);
  for (std::size_t t = 0; t < r.trace.size(); ++t) {
    const auto i = static_cast<Eigen::Index>(t);
    tr(i, 0) = static_cast<double>(t);
    tr(i, 1) = r.trace[t];
    tr(i, 2) = t == 0 ? 0.0 : r.rho[t - 1];
  }
  write_table(run, "ncvmp_trace.csv", {"iteration", "bound", "rho"}, tr);
  run.out() << "ncvmp converged in " << r.iterations << " iterations, bound " << format_double(r.trace.back()) << '\n';
  print_posterior(run.out(), names, r.q);
  run.results()["iterations"] = r.iterations;
  run.results()["bound"] = r.trace.back();
}

struct SviOpts {
  std::string cache, mode = "snis", init = "ncvmp";
  int K = 100, K0 = 1000, check_every = 1000;
  long max_iters = 200000, aux_iters = 30000, thin = 1000;
  double tol = 1e-5, ess_frac = 1.0 / 3.0, step = 0.01;
};

void run_svi(Run& run, const SviOpts& o) {
  const Globals& g = run.globals();
  const Network net = load_input(run);
  const AdjustedPL apl = load_cache(run, o.cache);
  if (apl.network_hash != net.hash()) throw UsageError("--adjust-cache was built for a different network");
  std::vector<std::string> terms;
  {
    std::stringstream ss(apl.spec);
    std::string t;
    while (std::getline(ss, t, ',')) terms.push_back(t);
  }
  const ModelSpec spec = ModelSpec::parse(terms);
  const auto names = spec.names();
  const GaussianPrior prior = prior_for(g, spec.dim());

  SviConfig cfg;
  if (o.mode == "mc")
    cfg.mode = SviMode::MonteCarlo;
  else if (o.mode == "snis")
    cfg.mode = SviMode::Snis;
  else if (o.mode == "fixed")
    cfg.mode = SviMode::FixedSnis;
  else
    throw UsageError("--mode must be mc, snis or fixed");
  cfg.K = o.K;
  cfg.ess_frac = o.ess_frac;
  cfg.tol = o.tol;
  cfg.check_every = o.check_every;
  cfg.max_iters = o.max_iters;
  cfg.adam.step = o.step;
  cfg.seed = derive_seed(g.seed, "svi");
  run.stream("svi", cfg.seed);

  GaussianVariational init;
  if (o.init == "ncvmp")
    init = ncvmp_fit(apl, prior, ncvmp_default_init(apl)).q;
  else if (o.init == "mple")
    init = GaussianVariational(apl.theta_pl, 0.1 * Eigen::MatrixXd::Identity(spec.dim(), spec.dim()));
  else
    throw UsageError("--init must be ncvmp or mple");

  SamplerConfig sampler{o.aux_iters, o.thin, 1, 1, 1};
  SamplerConfig rs{o.aux_iters, o.thin, o.K0, 1, derive_seed(g.seed, "elbo-ref")};
  run.stream("elbo-ref", rs.seed);
  const ElboReference ref = make_elbo_reference(net, spec, apl.theta_ml, apl.log_z_ml, o.K0, rs);
  const SviResult r = svi_fit(net, spec, prior, init, cfg, sampler, ref);

  write_posterior(run, "svi_posterior.csv", names, r.q);
  Eigen::MatrixXd lb(static_cast<Eigen::Index>(r.lbar.size()), 2);
  for (std::size_t b = 0; b < r.lbar.size(); ++b)
    lb.row(static_cast<Eigen::Index>(b)) << static_cast<double>((b + 1) * static_cast<std::size_t>(cfg.check_every)), r.lbar[b];
  write_table(run, "svi_lbar.csv", {"iteration", "lbar"}, lb);
  Eigen::MatrixXd es(static_cast<Eigen::Index>(r.ess.size()), 4);
  for (std::size_t t = 0; t < r.ess.size(); ++t)
    es.row(static_cast<Eigen::Index>(t)) << static_cast<double>(t + 1), r.ess[t], static_cast<double>(r.refreshed[t]),
        r.lhat[t];
  write_table(run, "svi_ess.csv", {"iteration", "ess", "refreshed", "lhat"}, es);
  Eigen::MatrixXd parts(static_cast<Eigen::Index>(r.particle_iters.size()), 2);
  for (std::size_t u = 0; u < r.particle_iters.size(); ++u)
    parts.row(static_cast<Eigen::Index>(u)) << static_cast<double>(u), static_cast<double>(r.particle_iters[u]);
  write_table(run, "svi_particles.csv", {"particle", "inserted_at"}, parts);
  const fs::path refpath = run.file("elbo_ref.json");
  save_elbo_reference(refpath, ref);
  run.output(refpath);

  std::ostream& out = run.out();
  out << "svi (" << o.mode << ") " << (r.converged ? "converged" : "stopped") << " after " << r.iterations
      << " iterations";
  if (!r.lbar.empty()) out << ", lbar " << format_double(r.lbar.back());
  out << '\n';
  if (cfg.mode != SviMode::MonteCarlo) out << "particles: " << r.particle_iters.size() << '\n';
  print_posterior(out, names, r.q);
  run.results()["iterations"] = r.iterations;
  run.results()["converged"] = r.converged;
  run.results()["particles"] = r.particle_iters.size();
  if (!r.lbar.empty()) run.results()["lbar"] = r.lbar.back();
}

void run_laplace(Run& run, const std::string& cache) {
  const AdjustedPL apl = load_cache(run, cache);
  const auto names = cache_names(apl);
  const GaussianVariational q = laplace_fit(apl, prior_for(run.globals(), apl.dim()));
  write_posterior(run, "laplace_posterior.csv", names, q);
  run.out() << "laplace approximation\n";
  print_posterior(run.out(), names, q);
}

struct ExchangeOpts {
  std::vector<double> theta0;
  long iters = 11000, burnin = 1000, aux_iters = 30000;
  double sigma_eps = 0.1;
};

void run_exchange(Run& run, const ExchangeOpts& o) {
  const Network net = load_input(run);
  const ModelSpec spec = load_spec(run.globals(), &net);
  const Eigen::VectorXd start = o.theta0.empty() ? mple(net, spec) : theta_arg(o.theta0, spec.dim(), "--theta0");
  ExchangeConfig cfg;
  cfg.iters = o.iters;
  cfg.burnin = o.burnin;
  cfg.aux_iters = o.aux_iters;
  cfg.sigma_eps = o.sigma_eps;
  cfg.seed = derive_seed(run.globals().seed, "exchange");
  run.stream("exchange", cfg.seed);
  const McmcChain c = exchange_sample(net, spec, prior_for(run.globals(), spec.dim()), start, cfg);
  write_table(run, "exchange_draws.csv", spec.names(), c.draws);
  const Eigen::VectorXd mean = c.draws.colwise().mean().transpose();
  const Eigen::VectorXd sd =
      ((c.draws.rowwise() - mean.transpose()).colwise().squaredNorm() / std::max<double>(1.0, c.draws.rows() - 1.0))
          .cwiseSqrt()
          .transpose();
  run.out() << "acceptance rate " << format_double(c.acceptance_rate) << '\n'
            << "posterior mean " << vec_text(mean) << '\n'
            << "posterior sd " << vec_text(sd) << '\n';
  run.results()["acceptance_rate"] = c.acceptance_rate;
}

struct IwlbOpts {
  std::string posterior, path = "I", cache, elbo_ref, label;
  int N = 1000, J = 50, max_rounds = 2000;
  double tol = 1e-5;
  std::optional<double> initial;
};

void run_iwlb(Run& run, const IwlbOpts& o) {
  require_file(o.posterior, "--posterior");
  run.input(o.posterior);
  const PosteriorCsv post = read_posterior_csv(o.posterior);
  const int p = post.q.dim();
  const GaussianPrior prior = prior_for(run.globals(), p);
  kernels::LogJoint lj;
  AdjustedPL apl;
  ElboReference ref;
  if (o.path == "I") {
    apl = load_cache(run, o.cache);
    if (apl.dim() != p) throw UsageError("posterior and adjustment cache have different dimensions");
    lj = path_one(apl, prior);
  } else if (o.path == "II") {
    require_file(o.elbo_ref, "--elbo-ref");
    run.input(o.elbo_ref);
    ref = load_elbo_reference(o.elbo_ref);
    if (ref.theta_ml.size() != p) throw UsageError("posterior and ELBO reference have different dimensions");
    lj = path_two(ref, prior);
  } else {
    throw UsageError("--path must be I or II");
  }
  IwlbConfig cfg;
  cfg.N = o.N;
  cfg.J = o.J;
  cfg.tol = o.tol;
  cfg.max_rounds = o.max_rounds;
  cfg.seed = derive_seed(run.globals().seed, "iwlb");
  run.stream("iwlb", cfg.seed);
  const IwlbResult r = iwlb(post.q, lj, cfg, o.initial);
  const std::string label = o.label.empty() ? fs::path(o.posterior).stem().string() : o.label;
  write_rows(run, run.file("iwlb-" + label + ".csv"),
             {"label", "path", "value", "V", "se", "initial", "nonfinite", "rounds", "converged"},
             {{label, o.path, format_double(r.value), std::to_string(r.V), format_double(r.se), format_double(r.initial),
               std::to_string(r.nonfinite), std::to_string(r.trace.size()), r.converged ? "1" : "0"}});
  Eigen::MatrixXd tr(static_cast<Eigen::Index>(r.trace.size()), 2);
  for (std::size_t t = 0; t < r.trace.size(); ++t)
    tr.row(static_cast<Eigen::Index>(t)) << static_cast<double>((t + 1) * static_cast<std::size_t>(cfg.J)), r.trace[t];
  write_table(run, "iwlb-" + label + "_trace.csv", {"V", "value"}, tr);
  if (r.nonfinite > 0) run.out() << "warning: " << r.nonfinite << " non-finite log weights were given zero weight\n";
  run.out() << "iwlb " << label << " (path " << o.path << "): " << format_double(r.value) << "  V = " << r.V
            << "  se = " << format_double(r.se) << '\n';
  run.results()["value"] = r.value;
  run.results()["V"] = r.V;
}

void run_compare(Run& run, const std::vector<std::string>& files, const std::string& reference) {
  if (files.size() < 2) throw UsageError("compare needs at least two IWLB files");
  std::vector<std::string> labels;
  Eigen::VectorXd ev(static_cast<Eigen::Index>(files.size()));
  for (std::size_t k = 0; k < files.size(); ++k) {
    require_file(files[k], "compare input");
    run.input(files[k]);
    std::vector<std::string> header;
    const auto rows = read_rows(files[k], header);
    const auto col = [&](const std::string& name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw ParseError(files[k], 1, "missing column " + name);
      return static_cast<std::size_t>(it - header.begin());
    };
    if (rows.size() != 1) throw ParseError(files[k], 2, "expected one IWLB row");
    labels.push_back(rows[0][col("label")]);
    ev[static_cast<Eigen::Index>(k)] = parse_double(rows[0][col("value")], files[k]);
  }
  int ref = 0;
  if (!reference.empty()) {
    const auto it = std::find(labels.begin(), labels.end(), reference);
    if (it == labels.end()) throw UsageError("--reference " + reference + " is not among the inputs");
    ref = static_cast<int>(it - labels.begin());
  }
  const Eigen::VectorXd bf = bayes_factors(ev, ref);
  std::vector<std::size_t> order(files.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ev[static_cast<Eigen::Index>(a)] > ev[static_cast<Eigen::Index>(b)];
  });
  std::vector<std::vector<std::string>> rows;
  std::ostream& out = run.out();
  out << std::left << std::setw(6) << "rank" << std::setw(16) << "model" << std::setw(16) << "log evidence"
      << std::setw(14) << "log BF" << "BF vs " << labels[static_cast<std::size_t>(ref)] << '\n';
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(order[r]);
    const double lbf = ev[i] - ev[ref];
    rows.push_back({std::to_string(r + 1), labels[order[r]], format_double(ev[i]), format_double(lbf), format_double(bf[i])});
    std::ostringstream a, b, c;
    a << std::fixed << std::setprecision(3) << ev[i];
    b << std::fixed << std::setprecision(3) << lbf;
    c << std::setprecision(4) << bf[i];
    out << std::setw(6) << r + 1 << std::setw(16) << labels[order[r]] << std::setw(16) << a.str() << std::setw(14)
        << b.str() << c.str() << '\n';
  }
  write_rows(run, run.file("compare.csv"), {"rank", "model", "log_evidence", "log_bf", "bf"}, rows);
  std::string ranking;
  for (std::size_t r = 0; r < order.size(); ++r) ranking += (r ? " > " : "") + labels[order[r]];
  out << "ranking: " << ranking << '\n';
  run.results()["ranking"] = ranking;
}

/// Marginals from either a posterior CSV or a CSV of draws.
std::pair<std::vector<std::string>, std::vector<Marginal>> read_marginals(Run& run, const std::string& path,
                                                                           const std::string& flag) {
  require_file(path, flag);
  run.input(path);
  std::ifstream f(path);
  std::string first;
  std::getline(f, first);
  f.close();
  std::vector<Marginal> ms;
  if (first.rfind("param,mean,sd", 0) == 0) {
    const PosteriorCsv pc = read_posterior_csv(path);
    const Eigen::VectorXd sd = pc.q.sd();
    for (int k = 0; k < pc.q.dim(); ++k) ms.push_back(Marginal::gaussian(pc.q.mu[k], sd[k]));
    return {pc.names, ms};
  }
  const TableCsv t = read_table_csv(path);
  for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
    const Eigen::VectorXd col = t.values.col(c);
    ms.push_back(Marginal::from_samples(std::vector<double>(col.data(), col.data() + col.size())));
  }
  return {t.header, ms};
}

void run_kl(Run& run, const std::string& a, const std::string& b) {
  const auto [na, ma] = read_marginals(run, a, "--a");
  const auto [nb, mb] = read_marginals(run, b, "--b");
  if (na != nb) throw UsageError("--a and --b describe different parameters");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < na.size(); ++k) {
    const double kl = marginal_kl(ma[k], mb[k]);
    rows.push_back({na[k], format_double(kl)});
    run.out() << "KL " << na[k] << ": " << format_double(kl) << '\n';
  }
  write_rows(run, run.file("kl.csv"), {"param", "kl"}, rows);
}

void run_changestats(Run& run) {
  const Network net = load_input(run);
  const ModelSpec spec = load_spec(run.globals(), &net);
  write_table(run, "changestats.csv", spec.names(), all_change_stats(net, spec));
  run.out() << net.dyad_count() << " dyads x " << spec.dim() << " terms\n";
}

void run_oracle(Run& run, const std::vector<double>& theta_in) {
  const Network net = load_or_empty(run);
  const ModelSpec spec = load_spec(run.globals(), &net);
  const Eigen::VectorXd theta = theta_arg(theta_in, spec.dim(), "--theta");
  const OracleResult r = enumerate_oracle(net, theta, spec);
  const auto names = spec.names();
  std::vector<std::vector<std::string>> rows{{"log_z", format_double(r.log_z)}};
  for (std::size_t k = 0; k < names.size(); ++k) rows.push_back({"mean:" + names[k], format_double(r.mean[static_cast<Eigen::Index>(k)])});
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j)
      rows.push_back({"cov:" + names[i] + ":" + names[j],
                      format_double(r.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
  write_rows(run, run.file("oracle.csv"), {"quantity", "value"}, rows);
  run.out() << "log_z = " << format_double(r.log_z) << '\n' << "mean = " << vec_text(r.mean) << '\n';
  run.results()["log_z"] = r.log_z;
}

void run_karate(Run& run, bool quick) {
  const Globals& g = run.globals();
  Network net;
  if (g.network.empty()) {
    const fs::path path = fs::path(VERGM_DATA_DIR) / "karate.edgelist";
    if (!fs::is_regular_file(path)) throw UsageError("bundled karate data not found at " + path.string());
    run.input(path);
    net = load_network(path, 34);
  } else {
    net = load_input(run);
  }
  ReproduceConfig cfg;
  cfg.seed = g.seed;
  cfg.quick = quick;
  if (quick) {
    cfg.tol_path1 = 1.0;
    cfg.tol_path2 = 1.5;
  }
  std::ostream& out = run.out();
  const auto runs = reproduce_karate(net, cfg, &out);

  std::vector<std::vector<std::string>> rows;
  out << '\n'
      << std::left << std::setw(6) << "model" << std::setw(10) << "method" << std::setw(6) << "path" << std::setw(12)
      << "iwlb" << std::setw(8) << "V" << std::setw(12) << "published" << std::setw(10) << "diff" << "status\n";
  int failures = 0;
  for (const ModelRun& m : runs) {
    const auto names = m.spec.names();
    for (const MethodRow& r : m.rows) {
      write_posterior(run, "karate_" + m.model.name + "_" + r.method + "_posterior.csv", names, r.q);
      const double pub = r.path == 1 ? m.model.published_path1 : m.model.published_path2;
      const double tol = r.path == 1 ? cfg.tol_path1 : cfg.tol_path2;
      const double diff = r.iw.value - pub;
      const bool ok = std::abs(diff) <= tol;
      failures += ok ? 0 : 1;
      rows.push_back({m.model.name, r.method, r.path == 1 ? "I" : "II", format_double(r.iw.value), std::to_string(r.iw.V),
                      format_double(pub), format_double(diff), format_double(tol), ok ? "pass" : "fail"});
      std::ostringstream v, d;
      v << std::fixed << std::setprecision(2) << r.iw.value;
      d << std::showpos << std::fixed << std::setprecision(2) << diff;
      out << std::setw(6) << m.model.name << std::setw(10) << r.method << std::setw(6) << (r.path == 1 ? "I" : "II")
          << std::setw(12) << v.str() << std::setw(8) << r.iw.V << std::setw(12) << pub << std::setw(10) << d.str()
          << (ok ? "pass" : "fail") << '\n';
    }
    Eigen::MatrixXd parts(static_cast<Eigen::Index>(m.svi_b.particle_iters.size()), 2);
    for (std::size_t u = 0; u < m.svi_b.particle_iters.size(); ++u)
      parts.row(static_cast<Eigen::Index>(u)) << static_cast<double>(u), static_cast<double>(m.svi_b.particle_iters[u]);
    write_table(run, "karate_" + m.model.name + "_svi-b_particles.csv", {"particle", "inserted_at"}, parts);
  }
  write_rows(run, run.file("karate_iwlb.csv"),
             {"model", "method", "path", "iwlb", "V", "published", "difference", "tolerance", "status"}, rows);
  std::string ranking;
  const auto order = karate_ranking(runs);
  for (std::size_t k = 0; k < order.size(); ++k) ranking += (k ? " > " : "") + order[k];
  out << "ranking (path I, NCVMP): " << ranking << '\n' << failures << " of " << rows.size() << " rows outside tolerance\n";
  run.results()["ranking"] = ranking;
  run.results()["rows_outside_tolerance"] = failures;
}

/// Top-level keys plus those of the subcommand that ran.
std::string resolved_config(const std::string& all, const std::string& sub) {
  std::stringstream in(all);
  std::string line, out;
  while (std::getline(in, line)) {
    const std::string key = line.substr(0, line.find('='));
    if (key.find('.') == std::string::npos || key.rfind(sub + ".", 0) == 0) out += line + '\n';
  }
  return out;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const InvalidDyad*>(&e)) return "InvalidDyad";
  if (dynamic_cast<const CapacityError*>(&e)) return "CapacityError";
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const DegeneracyError*>(&e)) return "DegeneracyError";
  if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational Bayes for exponential random graph models", "vergm"};
  app.set_version_flag("--version", std::string("vergm ") + kVersion + " (data format " + std::to_string(kDataFormat) + ")");
  app.set_config("--config", "", "TOML file of option values; command-line flags win");
  app.require_subcommand(1, 1);
  app.fallthrough();

  Globals g;
  app.add_option("--network", g.network, "edge list, 1-based node pairs");
  app.add_option("--nodes", g.nodes, "number of nodes");
  app.add_option("--attr", g.attrs, "node attribute as name=path (repeatable)");
  app.add_option("--terms", g.terms, "model terms, e.g. edges,gwesp:0.2")->delimiter(',');
  app.add_option("--seed", g.seed, "root seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--workers", g.workers, "thread cap (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--prior-var", g.prior_var, "variance of the N(0, v I) prior")->capture_default_str()->check(CLI::PositiveNumber);

  std::function<void(Run&)> action;
  std::string chosen;
  auto sub = [&](const std::string& name, const std::string& help, std::function<void(Run&)> f) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&, name, f] {
      chosen = name;
      action = f;
    });
    return s;
  };

  SimulateOpts so;
  auto* s_sim = sub("simulate", "simulate networks and print their statistics", [&](Run& r) { run_simulate(r, so); });
  s_sim->add_option("--theta", so.theta, "parameter, comma separated")->delimiter(',')->required();
  s_sim->add_option("--aux-iters", so.aux_iters, "burn-in steps")->capture_default_str();
  s_sim->add_option("--thin", so.thin, "steps between draws")->capture_default_str();
  s_sim->add_option("--count", so.count, "networks to keep")->capture_default_str();
  s_sim->add_option("--chains", so.chains, "independent chains")->capture_default_str();

  sub("mple", "maximum pseudolikelihood estimate", [&](Run& r) { run_mple(r); });

  McmleOpts mo;
  auto* s_ml = sub("mcmle", "Monte Carlo maximum likelihood estimate", [&](Run& r) { run_mcmle(r, mo); });
  s_ml->add_option("--theta0", mo.theta0, "starting value (default: MPLE)")->delimiter(',');
  s_ml->add_option("--aux-iters", mo.aux_iters)->capture_default_str();
  s_ml->add_option("--thin", mo.thin)->capture_default_str();
  s_ml->add_option("--count", mo.count, "networks per round")->capture_default_str();
  s_ml->add_option("--max-rounds", mo.max_rounds)->capture_default_str();
  s_ml->add_option("--tol", mo.tol)->capture_default_str();

  AdjustOpts ao;
  auto* s_adj = sub("adjust", "build the adjusted pseudolikelihood cache", [&](Run& r) { run_adjust(r, ao); });
  s_adj->add_option("--temps", ao.temps, "tempering rungs J")->capture_default_str();
  s_adj->add_option("--rung-samples", ao.rung_samples, "networks per rung K")->capture_default_str();
  s_adj->add_option("--count", ao.count, "networks for MCMC-MLE and the covariance")->capture_default_str();
  s_adj->add_option("--aux-iters", ao.aux_iters)->capture_default_str();
  s_adj->add_option("--thin", ao.thin)->capture_default_str();
  s_adj->add_flag("--unmodified", ao.unmodified, "temper from theta = 0 instead of the Bernoulli graph");
  s_adj->add_flag("--exact", ao.exact, "use exact enumeration (at most 5 nodes)");

  NcvmpOpts no;
  auto* s_nc = sub("fit-ncvmp", "NCVMP Gaussian approximation", [&](Run& r) { run_ncvmp(r, no); });
  s_nc->add_option("--adjust-cache", no.cache)->required();
  s_nc->add_option("--tol", no.tol)->capture_default_str();
  s_nc->add_option("--max-iters", no.max_iters)->capture_default_str();
  s_nc->add_option("--quad-order", no.quad_order)->capture_default_str();

  SviOpts vo;
  auto* s_svi = sub("fit-svi", "stochastic variational inference", [&](Run& r) { run_svi(r, vo); });
  s_svi->add_option("--adjust-cache", vo.cache, "supplies theta_ML and log z(theta_ML)")->required();
  s_svi->add_option("--mode", vo.mode, "mc, snis or fixed")->capture_default_str();
  s_svi->add_option("--K", vo.K, "networks per gradient")->capture_default_str();
  s_svi->add_option("--K0", vo.K0, "networks behind the bound estimate")->capture_default_str();
  s_svi->add_option("--tol", vo.tol)->capture_default_str();
  s_svi->add_option("--init", vo.init, "ncvmp or mple")->capture_default_str();
  s_svi->add_option("--ess-frac", vo.ess_frac)->default_str(format_double(vo.ess_frac));
  s_svi->add_option("--check-every", vo.check_every)->capture_default_str();
  s_svi->add_option("--max-iters", vo.max_iters)->capture_default_str();
  s_svi->add_option("--step", vo.step, "Adam step size")->capture_default_str();
  s_svi->add_option("--aux-iters", vo.aux_iters)->capture_default_str();
  s_svi->add_option("--thin", vo.thin)->capture_default_str();

  std::string lap_cache;
  auto* s_lap = sub("fit-laplace", "Laplace approximation", [&](Run& r) { run_laplace(r, lap_cache); });
  s_lap->add_option("--adjust-cache", lap_cache)->required();

  ExchangeOpts eo;
  auto* s_ex = sub("fit-exchange", "exchange algorithm", [&](Run& r) { run_exchange(r, eo); });
  s_ex->add_option("--theta0", eo.theta0, "starting value (default: MPLE)")->delimiter(',');
  s_ex->add_option("--iters", eo.iters)->capture_default_str();
  s_ex->add_option("--burnin", eo.burnin)->capture_default_str();
  s_ex->add_option("--aux-iters", eo.aux_iters)->capture_default_str();
  s_ex->add_option("--sigma-eps", eo.sigma_eps)->capture_default_str();

  IwlbOpts io;
  auto* s_iw = sub("iwlb", "importance weighted lower bound", [&](Run& r) { run_iwlb(r, io); });
  s_iw->add_option("--posterior", io.posterior)->required();
  s_iw->add_option("--path", io.path, "I (adjusted pseudolikelihood) or II (simulated)")->capture_default_str();
  s_iw->add_option("--adjust-cache", io.cache);
  s_iw->add_option("--elbo-ref", io.elbo_ref);
  s_iw->add_option("--label", io.label, "model label (default: posterior file stem)");
  s_iw->add_option("--N", io.N)->capture_default_str();
  s_iw->add_option("--J", io.J)->capture_default_str();
  s_iw->add_option("--tol", io.tol)->capture_default_str();
  s_iw->add_option("--max-rounds", io.max_rounds)->capture_default_str();
  s_iw->add_option("--initial", io.initial, "bound the first round is compared with");

  std::vector<std::string> cmp_files;
  std::string cmp_ref;
  auto* s_cmp = sub("compare", "Bayes factors from IWLB files", [&](Run& r) { run_compare(r, cmp_files, cmp_ref); });
  s_cmp->add_option("inputs", cmp_files, "IWLB csv files")->required();
  s_cmp->add_option("--reference", cmp_ref, "label of the reference model (default: first input)");

  std::string kl_a, kl_b;
  auto* s_kl = sub("kl-compare", "marginal KL divergences", [&](Run& r) { run_kl(r, kl_a, kl_b); });
  s_kl->add_option("--a", kl_a)->required();
  s_kl->add_option("--b", kl_b)->required();

  sub("dump-changestats", "change statistics of every dyad", [&](Run& r) { run_changestats(r); });

  std::vector<double> or_theta;
  auto* s_or = sub("oracle", "exact log z and moments by enumeration", [&](Run& r) { run_oracle(r, or_theta); });
  s_or->add_option("--theta", or_theta)->delimiter(',')->required();

  bool quick = false;
  auto* s_kar = sub("reproduce-karate", "karate club experiments", [&](Run& r) { run_karate(r, quick); });
  s_kar->add_flag("--quick", quick, "short chains, looser tolerances");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (g.workers > 0) omp_set_num_threads(g.workers);
  Run run(chosen, g, out);
  try {
    action(run);
    run.finish(resolved_config(app.config_to_str(true, false), chosen));
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n' << "run with --help for the available options\n";
    return 2;
  } catch (const std::exception& e) {
    json msg;
    msg["error"] = error_kind(e);
    msg["subcommand"] = chosen;
    msg["message"] = e.what();
    err << msg.dump() << '\n';
    return 1;
  }
  return 0;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace vergm::cli
