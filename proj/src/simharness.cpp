#include "twoarm/simharness.hpp"

#include "twoarm/covariance.hpp"
#include "twoarm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace twoarm {

namespace {

std::uint64_t kind_tag(DesignKind kind) {
  switch (kind) {
    case DesignKind::Crfb: return 101;
    case DesignKind::Pb: return 102;
    case DesignKind::Pm: return 103;
    case DesignKind::Explicit: return 104;
  }
  return 0;
}

DesignSummary summarize(const std::string& name, const VectorXd& sample, double q) {
  DesignSummary s;
  s.design = name;
  s.mean = sample.mean();
  s.max = sample.maxCoeff();
  std::vector<double> values(sample.data(), sample.data() + sample.size());
  s.quantile = quantile_type7(values, q);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = values.size() > 1
                        ? std::sqrt(ss / (static_cast<double>(values.size()) - 1.0))
                        : 0.0;
  s.realized_c = sd > 0.0 ? (s.quantile - s.mean) / sd : 0.0;
  return s;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("ScenarioConfig: n must be even and >= 2");
  }
  if (n_z_draws < 1) throw std::invalid_argument("ScenarioConfig: n_z_draws >= 1");
  if (n_w_draws < 2) throw std::invalid_argument("ScenarioConfig: n_w_draws >= 2");
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("ScenarioConfig: q must lie in (0, 1)");
  }
  if (sigma_z < 0) throw std::invalid_argument("ScenarioConfig: sigma_z >= 0");
  if (designs.empty()) throw std::invalid_argument("ScenarioConfig: no designs");
  if (greedy_restarts < 1) {
    throw std::invalid_argument("ScenarioConfig: greedy_restarts >= 1");
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();

  // One fixed x; everything downstream conditions on it.
  rng::Stream xs = rng::substream(cfg.seed, {rng::tag::kScenarioX});
  VectorXd x(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) x[i] = xs.next_normal();
  const CovariateMatrix covariates{MatrixXd(x)};

  const VectorXd f = cfg.f_mode == FMode::Identity ? x : VectorXd::Zero(cfg.n);

  ScenarioResult result;
  result.config = cfg;
  result.x = x;

  SearchConfig search(cfg.greedy_restarts, cfg.seed);
  search.threads = cfg.threads;

  std::vector<DesignDistribution> designs;
  designs.reserve(cfg.designs.size());
  for (DesignKind kind : cfg.designs) {
    if (kind == DesignKind::Pb) {
      DesignDistribution d;
      d.kind = DesignKind::Pb;
      d.n = cfg.n;
      Allocation w_star = cfg.pb_solver == PbSolver::Brute
                              ? brute_force_optimal(covariates, search.max_enumeration_n)
                              : greedy_optimize(covariates, search);
      const double mean_diff = 2.0 * dot(w_star, x) / static_cast<double>(cfg.n);
      result.w_star_imbalance = mean_diff * mean_diff;
      if (cfg.pb_solver == PbSolver::Greedy &&
          result.w_star_imbalance > cfg.pb_imbalance_ceiling) {
        std::ostringstream warn;
        warn << "greedy w* squared mean-difference " << result.w_star_imbalance
             << " is above the ceiling " << cfg.pb_imbalance_ceiling;
        result.warnings.push_back(warn.str());
      }
      result.w_star = w_star;
      Allocation mirror = w_star.negated();
      d.support.push_back(std::move(w_star));
      d.support.push_back(std::move(mirror));
      d.probs = VectorXd::Constant(2, 0.5);
      designs.push_back(std::move(d));
    } else {
      designs.push_back(build_design(kind, covariates, search));
    }
    result.designs.push_back(to_string(kind));
  }

  std::vector<std::optional<AllocationCovariance>> sigmas(designs.size());
  if (cfg.mc_mode == McMode::Exact) {
    for (std::size_t k = 0; k < designs.size(); ++k) {
      sigmas[k] = design_sigma(designs[k]);
    }
  }

  result.mse_samples.assign(designs.size(), VectorXd(cfg.n_z_draws));
  const double sd = cfg.sigma_z;

  detail::parallel_for(cfg.n_z_draws, cfg.threads, [&](Index i) {
    rng::Stream zs =
        rng::substream(cfg.seed, {rng::tag::kZDraw, static_cast<std::uint64_t>(i)});
    VectorXd z(cfg.n);
    for (Index k = 0; k < cfg.n; ++k) z[k] = sd * zs.next_normal();
    for (std::size_t k = 0; k < designs.size(); ++k) {
      double mse;
      if (cfg.mc_mode == McMode::Exact) {
        mse = conditional_mse(f, z, *sigmas[k]);
      } else {
        rng::Stream ws = rng::substream(
            cfg.seed, {rng::tag::kWDraw, static_cast<std::uint64_t>(i),
                       kind_tag(designs[k].kind)});
        mse = empirical_mse_given_z(designs[k], f + z, cfg.n_w_draws, ws);
      }
      result.mse_samples[k][i] = mse;
    }
  });

  for (std::size_t k = 0; k < designs.size(); ++k) {
    result.summaries.push_back(
        summarize(result.designs[k], result.mse_samples[k], cfg.q));
  }
  return result;
}

std::vector<ScenarioConfig> presets() {
  ScenarioConfig baseline;
  baseline.name = "baseline";
  baseline.n = 20;
  baseline.sigma_z = 1.5;
  baseline.f_mode = FMode::Identity;

  ScenarioConfig null_f = baseline;
  null_f.name = "null_f";
  null_f.f_mode = FMode::Zero;

  ScenarioConfig strong_x = baseline;
  strong_x.name = "strong_x";
  strong_x.sigma_z = 0.01;

  ScenarioConfig large_n = baseline;
  large_n.name = "large_n";
  large_n.n = 200;
  large_n.pb_solver = PbSolver::Greedy;
  large_n.greedy_restarts = 20000;

  return {baseline, null_f, strong_x, large_n};
}

std::optional<ScenarioConfig> preset_by_name(const std::string& name) {
  for (const ScenarioConfig& cfg : presets()) {
    if (cfg.name == name) return cfg;
  }
  return std::nullopt;
}

std::vector<DensityRow> density_export(const ScenarioResult& result, int bins) {
  if (bins < 10) throw std::invalid_argument("density_export: bins must be >= 10");
  if (result.mse_samples.empty()) {
    throw std::invalid_argument("density_export: empty result");
  }
  std::vector<double> pooled;
  for (const VectorXd& s : result.mse_samples) {
    pooled.insert(pooled.end(), s.data(), s.data() + s.size());
  }
  double lo = quantile_type7(pooled, 0.005);
  double hi = quantile_type7(pooled, 0.995);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<DensityRow> rows;
  rows.reserve(result.mse_samples.size() * static_cast<std::size_t>(bins));
  for (std::size_t k = 0; k < result.mse_samples.size(); ++k) {
    const VectorXd& sample = result.mse_samples[k];
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (Index i = 0; i < sample.size(); ++i) {
      // Values outside the pooled range clamp to the edge bins.
      int b = static_cast<int>(std::floor((sample[i] - lo) / width));
      b = std::clamp(b, 0, bins - 1);
      counts[static_cast<std::size_t>(b)] += 1.0;
    }
    const double total = static_cast<double>(sample.size());
    for (int b = 0; b < bins; ++b) {
      DensityRow row;
      row.design = result.summaries[k].design;
      row.bin_left = lo + width * b;
      row.bin_right = lo + width * (b + 1);
      row.density = counts[static_cast<std::size_t>(b)] / (total * width);
      row.mean = result.summaries[k].mean;
      row.quantile = result.summaries[k].quantile;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace twoarm
