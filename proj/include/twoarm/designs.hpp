#pragma once

#include "twoarm/rng.hpp"
#include "twoarm/types.hpp"

#include <cstdint>

namespace twoarm {

struct SearchConfig {
  int restarts = 1;
  std::uint64_t seed = 0;
  Index max_enumeration_n = 24;
  int threads = 0;  // 0 = hardware concurrency

  SearchConfig() = default;
  SearchConfig(int restarts_, std::uint64_t seed_) : restarts(restarts_), seed(seed_) {
    if (restarts < 1) throw std::invalid_argument("SearchConfig: restarts must be >= 1");
  }
};

// All C(n, n/2) balanced allocations, ordered so the +1 index sets appear in
// lexicographic order. The list is closed under negation.
std::vector<Allocation> enumerate_balanced(Index n, Index cap = 24);

// Uniform draw over all balanced allocations: a random n/2-subset gets +1.
Allocation sample_crfb(Index n, rng::Stream& stream);

// Pair subjects by covariate similarity. For p = 1 subjects are sorted by
// value (ties by subject index) and consecutive entries paired; for p > 1,
// greedy nearest-neighbor matching under Mahalanobis distance.
PairSet match_pairs(const CovariateMatrix& x);

// Independent (+1,-1) or (-1,+1) within each pair, probability 1/2 each.
Allocation sample_pm(const PairSet& pairs, rng::Stream& stream);

struct ImbalanceDetail {
  double value = 0.0;
  bool pseudo_inverse_used = false;
};

// Mahalanobis distance between the treatment-arm and control-arm covariate
// means, under the sample covariance of x. For p = 1 this is
// |mean_T - mean_C| / sd(x). Invariant under w -> -w. A singular sample
// covariance falls back to the Moore-Penrose pseudo-inverse and is flagged.
ImbalanceDetail imbalance_detail(const CovariateMatrix& x, const Allocation& w);
double imbalance(const CovariateMatrix& x, const Allocation& w);

// Minimizes imbalance over the full enumeration; ties broken by
// lexicographic order of w. Rejects n over the enumeration cap.
Allocation brute_force_optimal(const CovariateMatrix& x, Index cap = 24);

// Steepest-descent local search: from a random balanced start, repeatedly
// applies the single treatment/control swap that most reduces imbalance,
// stopping at a local optimum. Returns the best local optimum over
// config.restarts independent starts; deterministic given config.seed.
Allocation greedy_optimize(const CovariateMatrix& x, const SearchConfig& config);

// Assembles the distribution for one of the three named designs. CRFB and PM
// get explicit support when small enough, and are sampler-backed otherwise.
// PB solves for w* by brute force within the enumeration cap, by greedy
// search above it.
DesignDistribution build_design(DesignKind kind, const CovariateMatrix& x,
                                const SearchConfig& config);

// One draw from a design distribution.
Allocation sample_allocation(const DesignDistribution& d, rng::Stream& stream);

}  // namespace twoarm
