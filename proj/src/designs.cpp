#include "twoarm/designs.hpp"

#include "twoarm/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

namespace twoarm {

namespace {

std::uint64_t binomial(Index n, Index k) {
  std::uint64_t r = 1;
  for (Index i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

// Whitening transform of the covariate rows under the sample covariance:
// Mahalanobis geometry becomes Euclidean on the transformed rows. Directions
// with eigenvalue below 1e-10 * lambda_max are dropped (pseudo-inverse).
struct Whitener {
  MatrixXd u;  // n x p whitened rows
  bool pseudo_inverse_used = false;

  explicit Whitener(const CovariateMatrix& x) {
    const MatrixXd& m = x.values();
    const Eigen::RowVectorXd mean = m.colwise().mean();
    const MatrixXd centered = m.rowwise() - mean;
    const MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(x.n() - 1);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
    const VectorXd& ev = es.eigenvalues();
    const double cutoff = 1e-10 * std::max(ev.maxCoeff(), 0.0);
    VectorXd inv_sqrt = VectorXd::Zero(ev.size());
    for (Index i = 0; i < ev.size(); ++i) {
      if (ev[i] > cutoff && ev[i] > 0.0) {
        inv_sqrt[i] = 1.0 / std::sqrt(ev[i]);
      } else {
        pseudo_inverse_used = true;
      }
    }
    u = m * es.eigenvectors() * inv_sqrt.asDiagonal();
  }

  // x_T - x_C in whitened coordinates: (2/n) u' w.
  VectorXd group_diff(const VectorXi& w) const {
    return (2.0 / static_cast<double>(u.rows())) *
           (u.transpose() * w.cast<double>());
  }

  double value(const VectorXi& w) const { return group_diff(w).norm(); }
};

Allocation steepest_descent(const Whitener& wh, Allocation w) {
  const Index n = wh.u.rows();
  const double step = 4.0 / static_cast<double>(n);
  VectorXd d = wh.group_diff(w.signs());
  double cur = d.squaredNorm();
  VectorXi signs = w.signs();
  for (;;) {
    double best = cur;
    Index best_i = -1, best_j = -1;
    for (Index i = 0; i < n; ++i) {
      if (signs[i] != 1) continue;
      for (Index j = 0; j < n; ++j) {
        if (signs[j] != -1) continue;
        const double cand =
            (d + step * (wh.u.row(j) - wh.u.row(i)).transpose()).squaredNorm();
        if (cand < best) {
          best = cand;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i < 0) break;
    signs[best_i] = -1;
    signs[best_j] = 1;
    // Recompute instead of updating incrementally so rounding cannot
    // accumulate; revert if the refreshed objective did not improve.
    d = wh.group_diff(signs);
    const double refreshed = d.squaredNorm();
    if (refreshed >= cur) {
      signs[best_i] = 1;
      signs[best_j] = -1;
      break;
    }
    cur = refreshed;
  }
  return Allocation(std::move(signs));
}

}  // namespace

std::vector<Allocation> enumerate_balanced(Index n, Index cap) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("enumerate_balanced: n must be even and >= 2");
  }
  if (n > cap) {
    throw std::invalid_argument(
        "enumerate_balanced: n=" + std::to_string(n) +
        " exceeds the enumeration cap " + std::to_string(cap));
  }
  const Index k = n / 2;
  std::vector<Allocation> out;
  out.reserve(binomial(n, k));
  std::vector<Index> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), Index{0});
  for (;;) {
    VectorXi w = VectorXi::Constant(n, -1);
    for (Index idx : comb) w[idx] = 1;
    out.emplace_back(std::move(w));
    // Advance to the next k-subset in lexicographic order.
    Index i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Allocation sample_crfb(Index n, rng::Stream& stream) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("sample_crfb: n must be even and >= 2");
  }
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  VectorXi w = VectorXi::Constant(n, -1);
  // Partial Fisher-Yates: the first n/2 slots become the treatment arm.
  for (Index i = 0; i < n / 2; ++i) {
    const Index j =
        i + static_cast<Index>(stream.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    w[idx[static_cast<std::size_t>(i)]] = 1;
  }
  return Allocation(std::move(w));
}

PairSet match_pairs(const CovariateMatrix& x) {
  const Index n = x.n();
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(n / 2));
  if (x.p() == 1) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return x.values()(a, 0) < x.values()(b, 0);
    });
    for (Index k = 0; k < n / 2; ++k) {
      Index i = order[static_cast<std::size_t>(2 * k)];
      Index j = order[static_cast<std::size_t>(2 * k + 1)];
      if (i > j) std::swap(i, j);
      pairs.emplace_back(i, j);
    }
    return PairSet(std::move(pairs));
  }

  // p > 1: greedily pair the closest unmatched subjects under Mahalanobis
  // distance, ties by lexicographic (i, j).
  Whitener wh(x);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n / 2; ++k) {
    double best = std::numeric_limits<double>::infinity();
    Index bi = -1, bj = -1;
    for (Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      for (Index j = i + 1; j < n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double dist = (wh.u.row(i) - wh.u.row(j)).norm();
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    used[static_cast<std::size_t>(bi)] = used[static_cast<std::size_t>(bj)] = true;
    pairs.emplace_back(bi, bj);
  }
  std::sort(pairs.begin(), pairs.end());
  return PairSet(std::move(pairs));
}

Allocation sample_pm(const PairSet& pairs, rng::Stream& stream) {
  VectorXi w(pairs.n());
  for (const auto& [i, j] : pairs.pairs()) {
    const int flip = static_cast<int>(stream.next_u64() & 1U);
    w[i] = flip ? -1 : 1;
    w[j] = -w[i];
  }
  return Allocation(std::move(w));
}

ImbalanceDetail imbalance_detail(const CovariateMatrix& x, const Allocation& w) {
  if (w.size() != x.n()) {
    throw std::invalid_argument("imbalance: allocation/covariate size mismatch");
  }
  Whitener wh(x);
  return ImbalanceDetail{wh.value(w.signs()), wh.pseudo_inverse_used};
}

double imbalance(const CovariateMatrix& x, const Allocation& w) {
  return imbalance_detail(x, w).value;
}

Allocation brute_force_optimal(const CovariateMatrix& x, Index cap) {
  if (x.n() > cap) {
    throw std::invalid_argument(
        "brute_force_optimal: n=" + std::to_string(x.n()) +
        " exceeds the enumeration cap " + std::to_string(cap) +
        "; use greedy_optimize");
  }
  Whitener wh(x);
  std::vector<Allocation> all = enumerate_balanced(x.n(), cap);
  const Allocation* best = nullptr;
  double best_val = std::numeric_limits<double>::infinity();
  for (const Allocation& w : all) {
    const double v = wh.value(w.signs());
    if (v < best_val || (v == best_val && best != nullptr && w.lex_less(*best))) {
      best_val = v;
      best = &w;
    }
  }
  return *best;
}

Allocation greedy_descend(const CovariateMatrix& x, const Allocation& start) {
  return steepest_descent(Whitener(x), start);
}

Allocation greedy_optimize(const CovariateMatrix& x, const SearchConfig& config) {
  if (config.restarts < 1) {
    throw std::invalid_argument("greedy_optimize: restarts must be >= 1");
  }
  Whitener wh(x);
  const Index n = x.n();
  std::vector<std::optional<Allocation>> slots(
      static_cast<std::size_t>(config.restarts));
  detail::parallel_for(config.restarts, config.threads, [&](Index r) {
    rng::Stream s = rng::substream(
        config.seed, {rng::tag::kGreedyRestart, static_cast<std::uint64_t>(r)});
    Allocation start = sample_crfb(n, s);
    slots[static_cast<std::size_t>(r)] = steepest_descent(wh, std::move(start));
  });
  const Allocation* best = nullptr;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& slot : slots) {
    const Allocation& w = *slot;
    const double v = wh.value(w.signs());
    if (v < best_val || (v == best_val && best != nullptr && w.lex_less(*best))) {
      best_val = v;
      best = &w;
    }
  }
  return *best;
}

DesignDistribution build_design(DesignKind kind, const CovariateMatrix& x,
                                const SearchConfig& config) {
  DesignDistribution d;
  d.kind = kind;
  d.n = x.n();
  switch (kind) {
    case DesignKind::Crfb: {
      if (x.n() <= config.max_enumeration_n) {
        d.support = enumerate_balanced(x.n(), config.max_enumeration_n);
        d.probs = VectorXd::Constant(static_cast<Index>(d.support.size()),
                                     1.0 / static_cast<double>(d.support.size()));
      }
      return d;
    }
    case DesignKind::Pb: {
      Allocation w_star = x.n() <= config.max_enumeration_n
                              ? brute_force_optimal(x, config.max_enumeration_n)
                              : greedy_optimize(x, config);
      Allocation mirror = w_star.negated();
      d.support.push_back(std::move(w_star));
      d.support.push_back(std::move(mirror));
      d.probs = VectorXd::Constant(2, 0.5);
      return d;
    }
    case DesignKind::Pm: {
      PairSet pairs = match_pairs(x);
      d.pairs = pairs.pairs();
      const Index m = pairs.n_pairs();
      if (m <= 20) {
        const std::uint64_t count = 1ULL << m;
        d.support.reserve(count);
        for (std::uint64_t bits = 0; bits < count; ++bits) {
          VectorXi w(x.n());
          for (Index k = 0; k < m; ++k) {
            const auto& [i, j] = pairs.pairs()[static_cast<std::size_t>(k)];
            const int sign = (bits >> k) & 1U ? -1 : 1;
            w[i] = sign;
            w[j] = -sign;
          }
          d.support.emplace_back(std::move(w));
        }
        d.probs = VectorXd::Constant(static_cast<Index>(count),
                                     1.0 / static_cast<double>(count));
      }
      return d;
    }
    case DesignKind::Explicit:
      throw std::invalid_argument(
          "build_design constructs crfb/pb/pm; explicit designs are assembled "
          "directly");
  }
  throw std::logic_error("build_design: unhandled kind");
}

Allocation sample_allocation(const DesignDistribution& d, rng::Stream& stream) {
  switch (d.kind) {
    case DesignKind::Crfb:
      return sample_crfb(d.n, stream);
    case DesignKind::Pm:
      return sample_pm(PairSet(d.pairs), stream);
    case DesignKind::Pb:
    case DesignKind::Explicit: {
      if (!d.has_explicit_support()) {
        throw std::invalid_argument("sample_allocation: no support to draw from");
      }
      const double u = stream.next_uniform01();
      double acc = 0.0;
      for (Index i = 0; i < d.probs.size(); ++i) {
        acc += d.probs[i];
        if (u < acc) return d.support[static_cast<std::size_t>(i)];
      }
      return d.support.back();
    }
  }
  throw std::logic_error("sample_allocation: unhandled kind");
}

}  // namespace twoarm
