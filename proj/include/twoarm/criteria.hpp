#pragma once

#include "twoarm/rng.hpp"
#include "twoarm/types.hpp"

#include <cstdint>
#include <vector>

namespace twoarm {

// Simple mean-differences estimator w'y / n; equals (mean_T - mean_C)/2
// under forced balance.
double beta_hat(const Allocation& w, const Eigen::Ref<const VectorXd>& y);

// MSE of beta_hat for fixed unobserved component z:
//   (1/n^2) (f+z)' Sigma (f+z).
double conditional_mse(const Eigen::Ref<const VectorXd>& f,
                       const Eigen::Ref<const VectorXd>& z,
                       const AllocationCovariance& sigma);

// Expectation of the conditional MSE over homoskedastic z:
//   f' Sigma f / n^2 + sigma2_z / n.
double mean_mse(const Eigen::Ref<const VectorXd>& f, double sigma2_z,
                const AllocationCovariance& sigma);

// Variance of the conditional MSE over z:
//   (1/n^4) (n kappa_z + 2 sigma2_z^2 |Sigma|_F^2 + 4 sigma2_z f' Sigma^2 f).
// The skewness term gamma_z 1' Sigma f vanishes under forced balance; it is
// evaluated and checked rather than silently dropped. Rejects covariances
// with Sigma 1 != 0.
double var_mse(const Eigen::Ref<const VectorXd>& f, const ResponseSpec& moments,
               const AllocationCovariance& sigma);

enum class CMode { Chebyshev, Gaussian };

// Standard-error multiplier: Chebyshev 1/sqrt(1-q), or the Gaussian
// rule-of-thumb 2.
double c_constant(CMode mode, double q = 0.0);

// Tail criterion Q = mean + c * sqrt(var), with the B1/B2/R decomposition.
CriterionReport tail_Q(const Eigen::Ref<const VectorXd>& f,
                       const ResponseSpec& moments,
                       const AllocationCovariance& sigma, double c);

struct EfronWorstCase {
  VectorXd z_adv;
  double bound = 0.0;          // lambda_max ||f + z_adv||^2 / n^2
  double realized_norm2 = 0.0; // ||z_adv||^2
  double alpha = 0.0;
  bool degenerate_eigenspace = false;
};

// Adversarial unobserved component: with v_max the top eigenvector of Sigma
// (aligned so v'f >= 0) and alpha = ||f||^2 / (1 + 2||f||), the returned
// z_adv makes f + z_adv = alpha v_max, so the conditional MSE attains the
// eigenvalue bound lambda_max ||f+z||^2 / n^2 exactly. A top eigenspace of
// dimension > 1 is resolved by maximizing alignment with f and flagged.
EfronWorstCase efron_worst_case(const Eigen::Ref<const VectorXd>& f,
                                const AllocationCovariance& sigma);

enum class McMode { Exact, Empirical };

struct McQuantile {
  double quantile = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double realized_c = 0.0;  // (quantile - mean) / sd of the MSE sample
  bool low_draw_warning = false;
  VectorXd per_z_mse;  // one entry per z draw, indexed by draw
};

// Average of (beta_hat - beta_T)^2 over n_w allocation draws at fixed z.
// PB scores its two mirror allocations directly, which is exact.
double empirical_mse_given_z(const DesignDistribution& d,
                             const Eigen::Ref<const VectorXd>& f_plus_z,
                             int n_w, rng::Stream& wstream);

// Distribution of the conditional MSE over Gaussian z draws. Each z draw is
// scored either exactly via the quadratic form, or empirically by averaging
// (beta_hat - beta_T)^2 over n_w allocation draws (PB always uses its two
// allocations, which is exact). Quantile is type-7 order statistics.
McQuantile mc_mse_quantile(const Eigen::Ref<const VectorXd>& f,
                           const DesignDistribution& design, double sigma2_z,
                           double q, int n_z, int n_w, std::uint64_t seed,
                           McMode mode = McMode::Exact, int threads = 0);

// One scaled noncentral chi-square component per distinct eigenvalue of
// Sigma: n^2 * conditional MSE under Gaussian z is distributed as
//   sum_g sigma2_z * lambda_g * ncchisq(df_g, ncp_g),
// with df the eigenvalue multiplicity and ncp the squared projection of f
// onto the eigenspace divided by sigma2_z.
struct NormalMixtureRep {
  struct Component {
    double eigenvalue = 0.0;
    int multiplicity = 0;
    double noncentrality = 0.0;  // projection^2 / sigma2_z
    double scale = 0.0;          // sigma2_z * eigenvalue
  };
  std::vector<Component> components;
  double sigma2_z = 0.0;

  double moment_mean() const;      // E[n^2 * cmse]
  double moment_variance() const;  // Var[n^2 * cmse]
};

NormalMixtureRep normal_mixture(const Eigen::Ref<const VectorXd>& f,
                                double sigma2_z,
                                const AllocationCovariance& sigma);

// Draw from the mixture; reproduces the law of n^2 * conditional_mse.
double sample_mixture(const NormalMixtureRep& rep, rng::Stream& stream);

// Type-7 (linear interpolation) empirical quantile.
double quantile_type7(std::vector<double> values, double q);

}  // namespace twoarm
