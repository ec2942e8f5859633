#include "twoarm/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace twoarm {

namespace {

constexpr double kSymTol = 1e-10;
constexpr double kPsdTol = 1e-8;
constexpr double kDiagTol = 1e-8;
constexpr double kRowSumTol = 1e-8;
constexpr double kProbTol = 1e-12;

std::vector<int> key_of(const Allocation& w) {
  std::vector<int> k(static_cast<std::size_t>(w.size()));
  for (Index i = 0; i < w.size(); ++i) k[static_cast<std::size_t>(i)] = w.signs()[i];
  return k;
}

}  // namespace

std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::Crfb: return "crfb";
    case DesignKind::Pb: return "pb";
    case DesignKind::Pm: return "pm";
    case DesignKind::Explicit: return "explicit";
  }
  return "unknown";
}

DesignKind design_kind_from_string(const std::string& s) {
  if (s == "crfb") return DesignKind::Crfb;
  if (s == "pb") return DesignKind::Pb;
  if (s == "pm") return DesignKind::Pm;
  if (s == "explicit") return DesignKind::Explicit;
  throw std::invalid_argument("unknown design kind: " + s);
}

DesignValidation validate_design(const DesignDistribution& d, Index n) {
  if (d.n != n) {
    throw std::invalid_argument("design length mismatch: design has n=" +
                                std::to_string(d.n) + ", expected " +
                                std::to_string(n));
  }
  DesignValidation v;
  std::ostringstream msg;

  if (!d.has_explicit_support()) {
    // Sampler-backed designs are balanced and mirrored by construction of
    // their samplers; nothing finite to enumerate.
    if (d.kind == DesignKind::Explicit) {
      msg << "explicit design with empty support; ";
      v.message = msg.str();
      return v;
    }
    v.nonempty = v.balance_ok = v.mirror_ok = v.normalized = v.distinct_ok = true;
    return v;
  }

  v.nonempty = true;
  if (static_cast<Index>(d.support.size()) != d.probs.size()) {
    throw std::invalid_argument("design support/probs length mismatch");
  }

  v.balance_ok = true;
  for (const auto& w : d.support) {
    if (w.size() != n) {
      throw std::invalid_argument("design allocation length mismatch");
    }
    // Allocation construction already forces balance; keep the check live
    // for serialized designs rebuilt from raw vectors.
    if (w.signs().sum() != 0) v.balance_ok = false;
  }
  if (!v.balance_ok) msg << "forced balance violated; ";

  double total = 0.0;
  bool nonneg = true;
  std::map<std::vector<int>, double> table;
  v.distinct_ok = true;
  for (Index i = 0; i < d.probs.size(); ++i) {
    if (d.probs[i] < 0) nonneg = false;
    total += d.probs[i];
    auto [it, inserted] =
        table.emplace(key_of(d.support[static_cast<std::size_t>(i)]), d.probs[i]);
    if (!inserted) v.distinct_ok = false;
  }
  if (!v.distinct_ok) msg << "duplicate allocations in support; ";
  v.normalized = nonneg && std::abs(total - 1.0) <= kProbTol;
  if (!v.normalized) msg << "weights do not sum to 1; ";

  v.mirror_ok = true;
  for (Index i = 0; i < d.probs.size(); ++i) {
    auto neg = key_of(d.support[static_cast<std::size_t>(i)].negated());
    auto it = table.find(neg);
    if (it == table.end() || std::abs(it->second - d.probs[i]) > kProbTol) {
      v.mirror_ok = false;
      break;
    }
  }
  if (!v.mirror_ok) msg << "mirror property violated; ";

  v.message = msg.str();
  return v;
}

bool AllocationCovariance::Checks::pass() const {
  return symmetry_gap <= kSymTol && min_eigenvalue >= -kPsdTol &&
         max_diag_gap <= kDiagTol && max_row_sum <= kRowSumTol;
}

std::string AllocationCovariance::Checks::describe() const {
  std::ostringstream os;
  os << "symmetry_gap=" << symmetry_gap << " min_eigenvalue=" << min_eigenvalue
     << " max_diag_gap=" << max_diag_gap << " max_row_sum=" << max_row_sum
     << " trace_gap=" << trace_gap;
  return os.str();
}

AllocationCovariance::Checks AllocationCovariance::validate(const MatrixXd& sigma) {
  Checks c;
  c.symmetry_gap = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  // Eigenvalue-based PSD check: the failure value is informative, unlike a
  // Cholesky breakdown.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  c.max_diag_gap = (sigma.diagonal().array() - 1.0).abs().maxCoeff();
  c.max_row_sum = (sigma * VectorXd::Ones(sigma.rows())).cwiseAbs().maxCoeff();
  c.trace_gap = std::abs(sigma.trace() - static_cast<double>(sigma.rows()));
  return c;
}

AllocationCovariance AllocationCovariance::checked(MatrixXd sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 2) {
    throw std::invalid_argument("AllocationCovariance: square matrix of size >= 2 required");
  }
  Checks c = validate(sigma);
  if (!c.pass()) {
    throw std::invalid_argument("AllocationCovariance invariants violated: " +
                                c.describe());
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  return AllocationCovariance(std::move(sigma), es.eigenvalues().maxCoeff());
}

ResponseSpec ResponseSpec::gaussian(double beta_T, VectorXd f, double sigma_z) {
  return with_moments(beta_T, std::move(f), sigma_z * sigma_z, 0.0, 0.0);
}

ResponseSpec ResponseSpec::with_moments(double beta_T, VectorXd f,
                                        double sigma2_z, double gamma_z,
                                        double kappa_z) {
  if (sigma2_z < 0) {
    throw std::invalid_argument("ResponseSpec: sigma2_z must be >= 0");
  }
  if (kappa_z < -2.0 * sigma2_z * sigma2_z) {
    throw std::invalid_argument(
        "ResponseSpec: kappa_z below the fourth-moment feasibility bound");
  }
  if (!f.allFinite()) {
    throw std::invalid_argument("ResponseSpec: f must be finite");
  }
  ResponseSpec s;
  s.beta_T = beta_T;
  s.f = std::move(f);
  s.sigma2_z = sigma2_z;
  s.gamma_z = gamma_z;
  s.kappa_z = kappa_z;
  return s;
}

}  // namespace twoarm
