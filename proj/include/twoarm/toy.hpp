#pragma once

#include "twoarm/types.hpp"

namespace twoarm {

// Paired adversarial construction: m pairs share an observed value per pair
// (a centered grid with spacing delta) while the unobserved component splits
// each pair into +a and -a. Matching on the observed covariate then pairs
// exactly the subjects whose unobserved values oppose.
struct ToyConfig {
  Index m = 2;       // pair count
  double a = 1.0;    // half-gap of the unobserved component
  double delta = 0;  // spacing of observed pair values

  ToyConfig(Index m_, double a_, double delta_) : m(m_), a(a_), delta(delta_) {
    if (m < 2) throw std::invalid_argument("ToyConfig: m must be >= 2");
    if (!(a > 0)) throw std::invalid_argument("ToyConfig: a must be > 0");
    if (delta < 0) throw std::invalid_argument("ToyConfig: delta must be >= 0");
  }
};

struct ToyData {
  CovariateMatrix x;
  VectorXd z;
  PairSet pairs;
};

ToyData toy_build(const ToyConfig& cfg);

// Ratio of observed to unobserved covariate standard deviations:
//   eta = delta * sqrt(m^2 - 1) / (a * sqrt(12)).
double toy_eta(const ToyConfig& cfg);

// Mean observed imbalance (x_T - x_C)^2, mean unobserved imbalance
// (z_T - z_C)^2, and MSE of the mean-differences estimator, for complete
// randomization and for within-pair matching.
struct ToyTable {
  double crfb_observed = 0.0;
  double crfb_unobserved = 0.0;
  double crfb_mse = 0.0;
  double match_observed = 0.0;
  double match_unobserved = 0.0;
  double match_mse = 0.0;
};

// Closed forms: CRFB row (4a^2 eta^2/(2m-1), 4a^2/(2m-1), a^2(eta^2+1)/(2m-1)),
// matching row (0, 4a^2/m, a^2/m).
ToyTable toy_table1(const ToyConfig& cfg);

// Exhaustive oracle: averages the same three metrics over all C(2m, m)
// balanced allocations and all 2^m within-pair splits, with
// y = beta_T w + x + z. Checks that the estimator MSE does not depend on
// beta_T by running two values.
ToyTable toy_enumerate_check(const ToyConfig& cfg, Index cap = 12);

}  // namespace twoarm
