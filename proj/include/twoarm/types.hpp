#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twoarm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Dense closed-form covariances are capped; the regime of interest is
// small-n trials.
inline constexpr Index kClosedFormCap = 4096;

// A +/-1 assignment of each subject to treatment (+1) or control (-1),
// with exactly half the subjects in each arm.
class Allocation {
 public:
  explicit Allocation(VectorXi w) : w_(std::move(w)) {
    if (w_.size() == 0 || w_.size() % 2 != 0) {
      throw std::invalid_argument("Allocation: length must be even and > 0");
    }
    Index sum = 0;
    for (Index i = 0; i < w_.size(); ++i) {
      if (w_[i] != 1 && w_[i] != -1) {
        throw std::invalid_argument("Allocation: entries must be +1 or -1");
      }
      sum += w_[i];
    }
    if (sum != 0) {
      throw std::invalid_argument("Allocation: arms must have equal size");
    }
  }

  const VectorXi& signs() const { return w_; }
  Index size() const { return w_.size(); }

  Allocation negated() const { return Allocation(-w_); }

  bool operator==(const Allocation& o) const { return w_ == o.w_; }

  // Lexicographic order with +1 ranked above -1, used for deterministic
  // tie-breaking.
  bool lex_less(const Allocation& o) const {
    for (Index i = 0; i < w_.size() && i < o.w_.size(); ++i) {
      if (w_[i] != o.w_[i]) return w_[i] > o.w_[i];
    }
    return w_.size() < o.w_.size();
  }

 private:
  VectorXi w_;
};

inline double dot(const Allocation& w, const Eigen::Ref<const VectorXd>& v) {
  return w.signs().cast<double>().dot(v);
}

// Fixed pre-treatment measurements, one row per subject.
class CovariateMatrix {
 public:
  explicit CovariateMatrix(MatrixXd x) : x_(std::move(x)) {
    if (x_.rows() < 2 || x_.rows() % 2 != 0) {
      throw std::invalid_argument("CovariateMatrix: n must be even and >= 2");
    }
    if (x_.cols() < 1) {
      throw std::invalid_argument("CovariateMatrix: p must be >= 1");
    }
    if (!x_.allFinite()) {
      throw std::invalid_argument("CovariateMatrix: entries must be finite");
    }
  }

  const MatrixXd& values() const { return x_; }
  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }
  Eigen::RowVectorXd row(Index i) const { return x_.row(i); }

 private:
  MatrixXd x_;
};

// Disjoint (i, j) index pairs covering all subjects, i < j within each pair.
class PairSet {
 public:
  explicit PairSet(std::vector<std::pair<Index, Index>> pairs)
      : pairs_(std::move(pairs)) {
    const Index n = static_cast<Index>(pairs_.size()) * 2;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (auto& [i, j] : pairs_) {
      if (i > j) std::swap(i, j);
      if (i < 0 || j >= n || i == j) {
        throw std::invalid_argument("PairSet: index out of range");
      }
      if (seen[static_cast<std::size_t>(i)] || seen[static_cast<std::size_t>(j)]) {
        throw std::invalid_argument("PairSet: overlapping pairs");
      }
      seen[static_cast<std::size_t>(i)] = seen[static_cast<std::size_t>(j)] = true;
    }
  }

  const std::vector<std::pair<Index, Index>>& pairs() const { return pairs_; }
  Index n_pairs() const { return static_cast<Index>(pairs_.size()); }
  Index n() const { return 2 * n_pairs(); }

 private:
  std::vector<std::pair<Index, Index>> pairs_;
};

enum class DesignKind { Crfb, Pb, Pm, Explicit };

std::string to_string(DesignKind kind);
DesignKind design_kind_from_string(const std::string& s);

// A finite distribution over allocations. Enumerable designs carry their
// support explicitly; CRFB and PM at large n are sampler-backed, tagged by
// kind, with closed-form covariance.
struct DesignDistribution {
  DesignKind kind = DesignKind::Explicit;
  Index n = 0;
  std::vector<Allocation> support;  // empty when sampler-backed
  VectorXd probs;
  std::vector<std::pair<Index, Index>> pairs;  // PM only

  bool has_explicit_support() const { return !support.empty(); }
};

struct DesignValidation {
  bool nonempty = false;
  bool balance_ok = false;
  bool mirror_ok = false;
  bool normalized = false;
  bool distinct_ok = false;
  std::string message;

  bool pass() const {
    return nonempty && balance_ok && mirror_ok && normalized && distinct_ok;
  }
};

// Checks the design invariants (mirror property, forced balance, weight
// normalization, distinct support) without mutating. A length mismatch with
// n is structural and throws instead.
DesignValidation validate_design(const DesignDistribution& d, Index n);

// Sigma_w = E[w w^T], the sufficient design parameter for every criterion.
class AllocationCovariance {
 public:
  struct Checks {
    double symmetry_gap = 0.0;      // max |sigma - sigma^T|
    double min_eigenvalue = 0.0;
    double max_diag_gap = 0.0;      // max |diag - 1|
    double max_row_sum = 0.0;       // max |sigma * 1|
    double trace_gap = 0.0;         // |trace - n|
    bool pass() const;
    std::string describe() const;
  };

  // Validates all invariants and throws std::invalid_argument on violation.
  static AllocationCovariance checked(MatrixXd sigma);

  static Checks validate(const MatrixXd& sigma);

  const MatrixXd& matrix() const { return sigma_; }
  Index n() const { return sigma_.rows(); }
  double lambda_max() const { return lambda_max_; }

 private:
  explicit AllocationCovariance(MatrixXd sigma, double lambda_max)
      : sigma_(std::move(sigma)), lambda_max_(lambda_max) {}

  MatrixXd sigma_;
  double lambda_max_;
};

// Treatment effect, observed response component f_i = f(x_i), and the noise
// moments entering the criteria.
struct ResponseSpec {
  double beta_T = 0.0;
  VectorXd f;
  double sigma2_z = 0.0;  // Var[z_i]
  double gamma_z = 0.0;   // E[z^3]
  double kappa_z = 0.0;   // E[z^4] - 3 (sigma2_z)^2

  static ResponseSpec gaussian(double beta_T, VectorXd f, double sigma_z);
  static ResponseSpec with_moments(double beta_T, VectorXd f, double sigma2_z,
                                   double gamma_z, double kappa_z);
};

// Per-design evaluation bundle for the tail criterion.
struct CriterionReport {
  double B1 = 0.0;          // f' Sigma f
  double B2 = 0.0;          // f' Sigma^2 f
  double R = 0.0;           // squared Frobenius norm of Sigma
  double lambda_max = 0.0;
  double mean_mse = 0.0;
  double var_mse = 0.0;
  double Q = 0.0;
  double c_used = 0.0;
  bool has_mc_quantile = false;
  double mc_quantile = 0.0;
};

}  // namespace twoarm
