#include "twoarm/toy.hpp"

#include "twoarm/designs.hpp"

#include <cmath>
#include <string>

namespace twoarm {

namespace {

// Group-mean metrics computed from raw group averages, independent of the
// criteria module. Returns ((x_T-x_C)^2, (z_T-z_C)^2, (est - beta_T)^2).
struct Metrics {
  double observed = 0.0;
  double unobserved = 0.0;
  double sq_err = 0.0;
};

Metrics metrics_for(const VectorXd& x, const VectorXd& z, double beta_T,
                    const Allocation& w) {
  const Index n = x.size();
  double xt = 0, xc = 0, zt = 0, zc = 0, yt = 0, yc = 0;
  for (Index i = 0; i < n; ++i) {
    const double y = beta_T * static_cast<double>(w.signs()[i]) + x[i] + z[i];
    if (w.signs()[i] > 0) {
      xt += x[i];
      zt += z[i];
      yt += y;
    } else {
      xc += x[i];
      zc += z[i];
      yc += y;
    }
  }
  const double half = static_cast<double>(n) / 2.0;
  Metrics m;
  const double dx = xt / half - xc / half;
  const double dz = zt / half - zc / half;
  const double est = (yt / half - yc / half) / 2.0;
  m.observed = dx * dx;
  m.unobserved = dz * dz;
  m.sq_err = (est - beta_T) * (est - beta_T);
  return m;
}

Metrics average_metrics(const VectorXd& x, const VectorXd& z, double beta_T,
                        const std::vector<Allocation>& allocations) {
  Metrics acc;
  for (const Allocation& w : allocations) {
    const Metrics m = metrics_for(x, z, beta_T, w);
    acc.observed += m.observed;
    acc.unobserved += m.unobserved;
    acc.sq_err += m.sq_err;
  }
  const double count = static_cast<double>(allocations.size());
  acc.observed /= count;
  acc.unobserved /= count;
  acc.sq_err /= count;
  return acc;
}

std::vector<Allocation> matched_allocations(const PairSet& pairs) {
  const Index m = pairs.n_pairs();
  std::vector<Allocation> out;
  out.reserve(1ULL << m);
  for (std::uint64_t bits = 0; bits < (1ULL << m); ++bits) {
    VectorXi w(pairs.n());
    for (Index k = 0; k < m; ++k) {
      const auto& [i, j] = pairs.pairs()[static_cast<std::size_t>(k)];
      const int sign = (bits >> k) & 1U ? -1 : 1;
      w[i] = sign;
      w[j] = -sign;
    }
    out.emplace_back(std::move(w));
  }
  return out;
}

}  // namespace

ToyData toy_build(const ToyConfig& cfg) {
  const Index n = 2 * cfg.m;
  MatrixXd x(n, 1);
  VectorXd z(n);
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(cfg.m));
  for (Index k = 0; k < cfg.m; ++k) {
    const double value =
        cfg.delta * (static_cast<double>(k + 1) -
                     (static_cast<double>(cfg.m) + 1.0) / 2.0);
    x(2 * k, 0) = value;
    x(2 * k + 1, 0) = value;
    z[2 * k] = cfg.a;
    z[2 * k + 1] = -cfg.a;
    pairs.emplace_back(2 * k, 2 * k + 1);
  }
  return ToyData{CovariateMatrix(std::move(x)), std::move(z),
                 PairSet(std::move(pairs))};
}

double toy_eta(const ToyConfig& cfg) {
  const double m = static_cast<double>(cfg.m);
  const double eta = cfg.delta * std::sqrt(m * m - 1.0) / (cfg.a * std::sqrt(12.0));
  // Cross-check against the population sds of the constructed covariates.
  const ToyData data = toy_build(cfg);
  const VectorXd x = data.x.values().col(0);
  const double mean_x = x.mean();
  const double sd_x = std::sqrt((x.array() - mean_x).square().mean());
  const double sd_z = std::sqrt(data.z.array().square().mean());
  const double direct = sd_x / sd_z;
  if (std::abs(eta - direct) > 1e-12 * std::max(1.0, eta)) {
    throw std::logic_error("toy_eta: formula disagrees with constructed sds");
  }
  return eta;
}

ToyTable toy_table1(const ToyConfig& cfg) {
  const double m = static_cast<double>(cfg.m);
  const double a2 = cfg.a * cfg.a;
  const double eta = toy_eta(cfg);
  const double eta2 = eta * eta;
  ToyTable t;
  t.crfb_observed = 4.0 * a2 * eta2 / (2.0 * m - 1.0);
  t.crfb_unobserved = 4.0 * a2 / (2.0 * m - 1.0);
  t.crfb_mse = a2 * (eta2 + 1.0) / (2.0 * m - 1.0);
  t.match_observed = 0.0;
  t.match_unobserved = 4.0 * a2 / m;
  t.match_mse = a2 / m;
  return t;
}

ToyTable toy_enumerate_check(const ToyConfig& cfg, Index cap) {
  if (cfg.m > cap) {
    throw std::invalid_argument("toy_enumerate_check: m exceeds cap " +
                                std::to_string(cap));
  }
  const ToyData data = toy_build(cfg);
  const VectorXd x = data.x.values().col(0);
  const std::vector<Allocation> crfb = enumerate_balanced(2 * cfg.m, 2 * cap);
  const std::vector<Allocation> matched = matched_allocations(data.pairs);

  const Metrics crfb_a = average_metrics(x, data.z, 1.0, crfb);
  const Metrics match_a = average_metrics(x, data.z, 1.0, matched);
  // The estimator is unbiased, so its MSE cannot depend on the true effect.
  const Metrics crfb_b = average_metrics(x, data.z, -2.5, crfb);
  const Metrics match_b = average_metrics(x, data.z, -2.5, matched);
  if (std::abs(crfb_a.sq_err - crfb_b.sq_err) > 1e-10 ||
      std::abs(match_a.sq_err - match_b.sq_err) > 1e-10) {
    throw std::logic_error("toy_enumerate_check: MSE depends on beta_T");
  }

  ToyTable t;
  t.crfb_observed = crfb_a.observed;
  t.crfb_unobserved = crfb_a.unobserved;
  t.crfb_mse = crfb_a.sq_err;
  t.match_observed = match_a.observed;
  t.match_unobserved = match_a.unobserved;
  t.match_mse = match_a.sq_err;
  return t;
}

}  // namespace twoarm
