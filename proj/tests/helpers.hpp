#pragma once

#include "twoarm/designs.hpp"
#include "twoarm/rng.hpp"
#include "twoarm/types.hpp"

#include <vector>

namespace twoarm::test {

// Uniform explicit design over the full balanced enumeration.
inline DesignDistribution uniform_crfb_design(Index n) {
  DesignDistribution d;
  d.kind = DesignKind::Explicit;
  d.n = n;
  d.support = enumerate_balanced(n);
  d.probs = VectorXd::Constant(static_cast<Index>(d.support.size()),
                               1.0 / static_cast<double>(d.support.size()));
  return d;
}

inline Allocation alloc(std::initializer_list<int> values) {
  VectorXi w(static_cast<Index>(values.size()));
  Index i = 0;
  for (int v : values) w[i++] = v;
  return Allocation(std::move(w));
}

inline VectorXd random_vector(Index n, rng::Stream& s) {
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = s.next_normal();
  return v;
}

}  // namespace twoarm::test
