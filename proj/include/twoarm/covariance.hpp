#pragma once

#include "twoarm/types.hpp"

namespace twoarm {

// Exact covariance of an explicit-support design: sum_i p_i w_i w_i^T.
// The design must pass validate_design.
AllocationCovariance sigma_exact(const DesignDistribution& d);

// Complete randomization with forced balance:
//   n/(n-1) I - 1/(n-1) J,
// eigenvalues 0 (once) and n/(n-1) (n-1 times).
AllocationCovariance sigma_crfb_closed(Index n);

// Perfect balance {w*, -w*}: the rank-1 matrix w* w*^T.
AllocationCovariance sigma_pb(const Allocation& w_star);

// Pairwise matching: unit diagonal, -1 at paired positions, 0 elsewhere.
AllocationCovariance sigma_pm(const PairSet& pairs);

// Covariance of any design: closed form when the kind admits one, otherwise
// the exact sum over explicit support.
AllocationCovariance design_sigma(const DesignDistribution& d);

}  // namespace twoarm
