#include "twoarm/covariance.hpp"

#include <string>

namespace twoarm {

AllocationCovariance sigma_exact(const DesignDistribution& d) {
  DesignValidation v = validate_design(d, d.n);
  if (!d.has_explicit_support()) {
    throw std::invalid_argument(
        "sigma_exact requires explicit support; use the closed form for kind " +
        to_string(d.kind));
  }
  if (!v.pass()) {
    throw std::invalid_argument("sigma_exact: invalid design: " + v.message);
  }
  MatrixXd sigma = MatrixXd::Zero(d.n, d.n);
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    const VectorXd w = d.support[i].signs().cast<double>();
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(w, d.probs[static_cast<Index>(i)]);
  }
  MatrixXd full = sigma.selfadjointView<Eigen::Lower>();
  return AllocationCovariance::checked(std::move(full));
}

AllocationCovariance sigma_crfb_closed(Index n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("sigma_crfb_closed: n must be even and >= 2");
  }
  if (n > kClosedFormCap) {
    throw std::invalid_argument("sigma_crfb_closed: n exceeds the dense cap " +
                                std::to_string(kClosedFormCap));
  }
  const double nn = static_cast<double>(n);
  MatrixXd sigma = MatrixXd::Constant(n, n, -1.0 / (nn - 1.0));
  sigma.diagonal().setOnes();
  return AllocationCovariance::checked(std::move(sigma));
}

AllocationCovariance sigma_pb(const Allocation& w_star) {
  if (w_star.size() > kClosedFormCap) {
    throw std::invalid_argument("sigma_pb: n exceeds the dense cap " +
                                std::to_string(kClosedFormCap));
  }
  const VectorXd w = w_star.signs().cast<double>();
  MatrixXd sigma = w * w.transpose();
  return AllocationCovariance::checked(std::move(sigma));
}

AllocationCovariance sigma_pm(const PairSet& pairs) {
  const Index n = pairs.n();
  if (n > kClosedFormCap) {
    throw std::invalid_argument("sigma_pm: n exceeds the dense cap " +
                                std::to_string(kClosedFormCap));
  }
  MatrixXd sigma = MatrixXd::Identity(n, n);
  for (const auto& [i, j] : pairs.pairs()) {
    sigma(i, j) = -1.0;
    sigma(j, i) = -1.0;
  }
  return AllocationCovariance::checked(std::move(sigma));
}

AllocationCovariance design_sigma(const DesignDistribution& d) {
  switch (d.kind) {
    case DesignKind::Crfb:
      return sigma_crfb_closed(d.n);
    case DesignKind::Pb:
      if (d.support.empty()) {
        throw std::invalid_argument("PB design is missing its support");
      }
      return sigma_pb(d.support.front());
    case DesignKind::Pm:
      return sigma_pm(PairSet(d.pairs));
    case DesignKind::Explicit:
      return sigma_exact(d);
  }
  throw std::logic_error("design_sigma: unhandled kind");
}

}  // namespace twoarm
