#pragma once

#include "twoarm/criteria.hpp"
#include "twoarm/designs.hpp"
#include "twoarm/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twoarm {

enum class FMode { Identity, Zero };

enum class PbSolver { Brute, Greedy };

// One fixed-x scenario: x is drawn once from the seed, then the MSE
// distribution over z draws is estimated per design.
struct ScenarioConfig {
  std::string name = "custom";
  Index n = 20;
  double beta_T = 1.0;
  FMode f_mode = FMode::Identity;
  double sigma_z = 1.5;
  int n_z_draws = 2000;
  int n_w_draws = 300;
  double q = 0.95;
  std::uint64_t seed = 1;
  std::vector<DesignKind> designs = {DesignKind::Crfb, DesignKind::Pb,
                                     DesignKind::Pm};
  PbSolver pb_solver = PbSolver::Brute;
  int greedy_restarts = 20000;
  // Warn (and continue) if the PB solver cannot push the squared
  // mean-difference below this ceiling.
  double pb_imbalance_ceiling = 1e-14;
  // Score each z draw by sampling allocations, as opposed to the exact
  // quadratic form; the exact mode exists for cross-validation.
  McMode mc_mode = McMode::Empirical;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct DesignSummary {
  std::string design;
  double mean = 0.0;
  double quantile = 0.0;
  double max = 0.0;
  double realized_c = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  VectorXd x;                          // the fixed covariate draw
  std::vector<std::string> designs;    // kind names, config order
  std::vector<VectorXd> mse_samples;   // per design, length n_z_draws
  std::vector<DesignSummary> summaries;
  std::optional<Allocation> w_star;    // PB optimum (present iff PB ran)
  double w_star_imbalance = 0.0;       // squared mean-difference of w*
  std::vector<std::string> warnings;
};

// Executes the full protocol: one x draw, design construction, n_z_draws
// shared z draws scored per design, summaries. Deterministic given the
// config (including seed), independent of thread count.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// The four named scenarios: baseline, null_f, strong_x, large_n.
std::vector<ScenarioConfig> presets();
std::optional<ScenarioConfig> preset_by_name(const std::string& name);

// Histogram rows for density plots: shared bin edges across designs over the
// pooled 0.5th-99.5th percentile range, values outside clamped to the edge
// bins. Each row carries the design's mean and quantile markers.
struct DensityRow {
  std::string design;
  double bin_left = 0.0;
  double bin_right = 0.0;
  double density = 0.0;
  double mean = 0.0;
  double quantile = 0.0;
};

std::vector<DensityRow> density_export(const ScenarioResult& result, int bins = 60);

}  // namespace twoarm
