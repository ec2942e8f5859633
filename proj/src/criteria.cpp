#include "twoarm/criteria.hpp"

#include "twoarm/covariance.hpp"
#include "twoarm/designs.hpp"
#include "twoarm/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace twoarm {

namespace {

constexpr double kBalanceTol = 1e-8;

double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

double empirical_mse_given_z(const DesignDistribution& d,
                             const Eigen::Ref<const VectorXd>& f_plus_z,
                             int n_w, rng::Stream& wstream) {
  const double n = static_cast<double>(d.n);
  if (d.kind == DesignKind::Pb) {
    double acc = 0.0;
    for (const Allocation& w : d.support) {
      const double err = dot(w, f_plus_z) / n;
      acc += err * err;
    }
    return acc / static_cast<double>(d.support.size());
  }
  if (n_w < 2) throw std::invalid_argument("empirical MSE needs n_w >= 2");
  double acc = 0.0;
  for (int k = 0; k < n_w; ++k) {
    const Allocation w = sample_allocation(d, wstream);
    const double err = dot(w, f_plus_z) / n;
    acc += err * err;
  }
  return acc / static_cast<double>(n_w);
}

double beta_hat(const Allocation& w, const Eigen::Ref<const VectorXd>& y) {
  if (w.size() != y.size()) {
    throw std::invalid_argument("beta_hat: length mismatch");
  }
  return dot(w, y) / static_cast<double>(w.size());
}

double conditional_mse(const Eigen::Ref<const VectorXd>& f,
                       const Eigen::Ref<const VectorXd>& z,
                       const AllocationCovariance& sigma) {
  if (f.size() != sigma.n() || z.size() != sigma.n()) {
    throw std::invalid_argument("conditional_mse: dimension mismatch");
  }
  const VectorXd v = f + z;
  const double n = static_cast<double>(sigma.n());
  return clamp_nonneg(v.dot(sigma.matrix() * v)) / (n * n);
}

double mean_mse(const Eigen::Ref<const VectorXd>& f, double sigma2_z,
                const AllocationCovariance& sigma) {
  if (sigma2_z < 0) throw std::invalid_argument("mean_mse: sigma2_z must be >= 0");
  if (f.size() != sigma.n()) {
    throw std::invalid_argument("mean_mse: dimension mismatch");
  }
  const double n = static_cast<double>(sigma.n());
  const double b1 = clamp_nonneg(f.dot(sigma.matrix() * f));
  return b1 / (n * n) + sigma2_z / n;
}

double var_mse(const Eigen::Ref<const VectorXd>& f, const ResponseSpec& moments,
               const AllocationCovariance& sigma) {
  if (f.size() != sigma.n()) {
    throw std::invalid_argument("var_mse: dimension mismatch");
  }
  const Index n = sigma.n();
  const VectorXd row_sums = sigma.matrix() * VectorXd::Ones(n);
  if (row_sums.cwiseAbs().maxCoeff() > kBalanceTol) {
    throw std::invalid_argument(
        "var_mse: Sigma * 1 != 0; the design is not forced-balance");
  }
  // The skewness term gamma_z * 1' Sigma f vanishes under forced balance.
  // Evaluate it and fail loudly if it ever does not.
  const double skew_term = moments.gamma_z * row_sums.dot(f);
  const double skew_budget = 1e-10 * std::max(1.0, std::abs(moments.gamma_z)) *
                             std::max(1.0, f.cwiseAbs().sum());
  if (std::abs(skew_term) > skew_budget) {
    throw std::logic_error("var_mse: skewness term did not vanish: " +
                           std::to_string(skew_term));
  }
  const double nn = static_cast<double>(n);
  const double r = sigma.matrix().squaredNorm();
  const VectorXd sf = sigma.matrix() * f;
  const double b2 = clamp_nonneg(sf.squaredNorm());
  const double s2 = moments.sigma2_z;
  const double num = nn * moments.kappa_z + 2.0 * s2 * s2 * r + 4.0 * s2 * b2;
  return clamp_nonneg(num) / (nn * nn * nn * nn);
}

double c_constant(CMode mode, double q) {
  if (mode == CMode::Gaussian) return 2.0;
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("c_constant: q must lie in (0, 1)");
  }
  return 1.0 / std::sqrt(1.0 - q);
}

CriterionReport tail_Q(const Eigen::Ref<const VectorXd>& f,
                       const ResponseSpec& moments,
                       const AllocationCovariance& sigma, double c) {
  CriterionReport rep;
  const double n = static_cast<double>(sigma.n());
  rep.B1 = clamp_nonneg(f.dot(sigma.matrix() * f));
  rep.B2 = clamp_nonneg((sigma.matrix() * f).squaredNorm());
  rep.R = sigma.matrix().squaredNorm();
  rep.lambda_max = sigma.lambda_max();
  rep.mean_mse = rep.B1 / (n * n) + moments.sigma2_z / n;
  rep.var_mse = var_mse(f, moments, sigma);
  rep.c_used = c;
  rep.Q = rep.mean_mse + c * std::sqrt(rep.var_mse);
  return rep;
}

EfronWorstCase efron_worst_case(const Eigen::Ref<const VectorXd>& f,
                                const AllocationCovariance& sigma) {
  if (f.size() != sigma.n()) {
    throw std::invalid_argument("efron_worst_case: dimension mismatch");
  }
  const double f_norm = f.norm();
  if (f_norm == 0.0) {
    throw std::invalid_argument("efron_worst_case: f must be nonzero");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma.matrix());
  const VectorXd& ev = es.eigenvalues();  // ascending
  const Index n = sigma.n();
  const double lambda_max = ev[n - 1];
  const double gap_tol = 1e-8 * std::max(1.0, std::abs(lambda_max));
  Index first = n - 1;
  while (first > 0 && lambda_max - ev[first - 1] <= gap_tol) --first;

  EfronWorstCase out;
  out.degenerate_eigenspace = first < n - 1;
  VectorXd v;
  if (out.degenerate_eigenspace) {
    // Resolve the tie by the direction inside the eigenspace most aligned
    // with f.
    const auto basis = es.eigenvectors().rightCols(n - first);
    const VectorXd proj = basis * (basis.transpose() * f);
    v = proj.norm() > 1e-12 * f_norm ? VectorXd(proj.normalized())
                                     : VectorXd(es.eigenvectors().col(n - 1));
  } else {
    v = es.eigenvectors().col(n - 1);
    if (v.dot(f) < 0.0) v = -v;
  }

  out.alpha = f_norm * f_norm / (1.0 + 2.0 * f_norm);
  out.z_adv = out.alpha * v - f;  // so that f + z_adv = alpha * v
  out.realized_norm2 = out.z_adv.squaredNorm();
  const double nn = static_cast<double>(n);
  out.bound = lambda_max * (f + out.z_adv).squaredNorm() / (nn * nn);

  const double attained = conditional_mse(f, out.z_adv, sigma);
  if (std::abs(attained - out.bound) > 1e-10 * std::max(1.0, out.bound)) {
    throw std::logic_error("efron_worst_case: constructed z does not attain the bound");
  }
  return out;
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - std::floor(h)) * (values[lo + 1] - values[lo]);
}

McQuantile mc_mse_quantile(const Eigen::Ref<const VectorXd>& f,
                           const DesignDistribution& design, double sigma2_z,
                           double q, int n_z, int n_w, std::uint64_t seed,
                           McMode mode, int threads) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("mc_mse_quantile: q must lie in (0, 1)");
  }
  if (n_z < 1) throw std::invalid_argument("mc_mse_quantile: n_z must be >= 1");
  if (sigma2_z < 0) throw std::invalid_argument("mc_mse_quantile: sigma2_z < 0");
  const Index n = design.n;
  if (f.size() != n) throw std::invalid_argument("mc_mse_quantile: dimension mismatch");

  McQuantile out;
  out.low_draw_warning = n_z < 100;
  out.per_z_mse.resize(n_z);

  std::optional<AllocationCovariance> sigma;
  if (mode == McMode::Exact) sigma = design_sigma(design);
  const double sd = std::sqrt(sigma2_z);
  const VectorXd fcopy = f;

  detail::parallel_for(n_z, threads, [&](Index i) {
    rng::Stream zs = rng::substream(
        seed, {rng::tag::kMcQuantile, rng::tag::kZDraw, static_cast<std::uint64_t>(i)});
    VectorXd z(n);
    for (Index k = 0; k < n; ++k) z[k] = sd * zs.next_normal();
    if (mode == McMode::Exact) {
      out.per_z_mse[i] = conditional_mse(fcopy, z, *sigma);
    } else {
      rng::Stream ws = rng::substream(
          seed,
          {rng::tag::kMcQuantile, rng::tag::kWDraw, static_cast<std::uint64_t>(i)});
      out.per_z_mse[i] = empirical_mse_given_z(design, fcopy + z, n_w, ws);
    }
  });

  std::vector<double> sample(out.per_z_mse.data(), out.per_z_mse.data() + n_z);
  out.mean = out.per_z_mse.mean();
  out.max = out.per_z_mse.maxCoeff();
  out.quantile = quantile_type7(sample, q);
  double ss = 0.0;
  for (double v : sample) ss += (v - out.mean) * (v - out.mean);
  const double sdev =
      n_z > 1 ? std::sqrt(ss / (static_cast<double>(n_z) - 1.0)) : 0.0;
  out.realized_c = sdev > 0.0 ? (out.quantile - out.mean) / sdev : 0.0;
  return out;
}

NormalMixtureRep normal_mixture(const Eigen::Ref<const VectorXd>& f,
                                double sigma2_z,
                                const AllocationCovariance& sigma) {
  if (!(sigma2_z > 0)) {
    throw std::invalid_argument("normal_mixture: sigma2_z must be > 0");
  }
  if (f.size() != sigma.n()) {
    throw std::invalid_argument("normal_mixture: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma.matrix());
  const VectorXd& ev = es.eigenvalues();
  const Index n = sigma.n();
  const double gap_tol = 1e-8 * std::max(1.0, ev[n - 1]);

  NormalMixtureRep rep;
  rep.sigma2_z = sigma2_z;
  Index i = n - 1;
  while (i >= 0) {
    const double lambda = ev[i];
    NormalMixtureRep::Component comp;
    comp.eigenvalue = clamp_nonneg(lambda);
    double proj2 = 0.0;
    Index j = i;
    while (j >= 0 && lambda - ev[j] <= gap_tol) {
      const double p = es.eigenvectors().col(j).dot(f);
      proj2 += p * p;
      --j;
    }
    comp.multiplicity = static_cast<int>(i - j);
    comp.noncentrality = proj2 / sigma2_z;
    comp.scale = sigma2_z * comp.eigenvalue;
    rep.components.push_back(comp);
    i = j;
  }
  return rep;
}

double NormalMixtureRep::moment_mean() const {
  double m = 0.0;
  for (const auto& c : components) {
    m += c.scale * (static_cast<double>(c.multiplicity) + c.noncentrality);
  }
  return m;
}

double NormalMixtureRep::moment_variance() const {
  double v = 0.0;
  for (const auto& c : components) {
    v += c.scale * c.scale *
         (2.0 * static_cast<double>(c.multiplicity) + 4.0 * c.noncentrality);
  }
  return v;
}

double sample_mixture(const NormalMixtureRep& rep, rng::Stream& stream) {
  double total = 0.0;
  for (const auto& c : rep.components) {
    if (c.scale <= 0.0) continue;
    // Noncentral chi-square: fold the noncentrality into one component.
    double x = 0.0;
    const double first = stream.next_normal() + std::sqrt(c.noncentrality);
    x += first * first;
    for (int k = 1; k < c.multiplicity; ++k) {
      const double g = stream.next_normal();
      x += g * g;
    }
    total += c.scale * x;
  }
  return total;
}

}  // namespace twoarm
