#pragma once

// End-to-end karate club runs: adjust, NCVMP, Laplace, SVI (a) and (b), then
// IWLB by both likelihood paths, for the three benchmark models.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vergm/modelsel.hpp"
#include "vergm/ncvmp.hpp"
#include "vergm/network.hpp"
#include "vergm/pseudo.hpp"
#include "vergm/svi.hpp"

namespace vergm {

struct KarateModel {
  std::string name;
  std::vector<std::string> terms;
  double published_path1;  // IWLB with the adjusted pseudolikelihood
  double published_path2;  // IWLB with the simulated likelihood
};

/// M1 edges+gwesp(0.2), M2 edges+gwd(0.8), M3 edges+gwesp(0.2)+gwd(0.8).
const std::vector<KarateModel>& karate_models();

struct ReproduceConfig {
  std::uint64_t seed = 1;
  bool quick = false;  // shorter chains and tempering, for smoke runs
  int svi_a_K = 5;
  int svi_b_K = 100;
  int K0 = 1000;  // networks behind the simulated likelihood
  double tol_path1 = 0.3;
  double tol_path2 = 0.5;
};

struct MethodRow {
  std::string method;  // ncvmp, laplace, svi-a, svi-b
  int path = 1;
  GaussianVariational q;
  IwlbResult iw;
};

struct ModelRun {
  KarateModel model;
  ModelSpec spec;
  AdjustedPL apl;
  ElboReference ref;
  NcvmpResult ncvmp;
  SviResult svi_a;
  SviResult svi_b;
  std::vector<MethodRow> rows;
};

/// Adjustment, sampler and SVI settings used by the reproduction.
AdjustConfig reproduce_adjust_config(const ReproduceConfig& cfg, const std::string& model);
SamplerConfig reproduce_sampler(const ReproduceConfig& cfg);

/// Runs one model. `log` (optional) receives one progress line per stage.
/// Any failure is rethrown with the stage name prefixed.
ModelRun reproduce_model(const Network& net, const KarateModel& model, const ReproduceConfig& cfg,
                         std::ostream* log = nullptr);

std::vector<ModelRun> reproduce_karate(const Network& net, const ReproduceConfig& cfg, std::ostream* log = nullptr);

/// Model names ordered by decreasing path-I IWLB of the NCVMP fit.
std::vector<std::string> karate_ranking(const std::vector<ModelRun>& runs);

}  // namespace vergm
