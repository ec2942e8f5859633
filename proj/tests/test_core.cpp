#include "twoarm/covariance.hpp"
#include "twoarm/designs.hpp"
#include "twoarm/types.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

using namespace twoarm;
using twoarm::test::alloc;
using twoarm::test::uniform_crfb_design;
using Catch::Matchers::WithinAbs;

TEST_CASE("Allocation enforces +/-1 entries and forced balance") {
  REQUIRE_NOTHROW(alloc({1, -1, 1, -1}));
  REQUIRE_THROWS_AS(alloc({1, 1, 1, -1}), std::invalid_argument);
  REQUIRE_THROWS_AS(alloc({1, 0, -1, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(alloc({1, -1, 1}), std::invalid_argument);
  REQUIRE(alloc({1, -1}).negated() == alloc({-1, 1}));
  REQUIRE(alloc({1, 1, -1, -1}).lex_less(alloc({1, -1, 1, -1})) == false);
  REQUIRE(alloc({1, -1, 1, -1}).lex_less(alloc({1, -1, -1, 1})));
}

TEST_CASE("CovariateMatrix validates its shape") {
  REQUIRE_THROWS_AS(CovariateMatrix(MatrixXd::Zero(3, 1)), std::invalid_argument);
  REQUIRE_THROWS_AS(CovariateMatrix(MatrixXd::Zero(4, 0)), std::invalid_argument);
  MatrixXd bad = MatrixXd::Zero(4, 1);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(CovariateMatrix(bad), std::invalid_argument);
  REQUIRE(CovariateMatrix(MatrixXd::Zero(4, 2)).n() == 4);
}

TEST_CASE("PairSet rejects overlaps and out-of-range indices") {
  using P = std::pair<Index, Index>;
  REQUIRE_NOTHROW(PairSet(std::vector<P>{{0, 1}, {2, 3}}));
  REQUIRE_THROWS_AS(PairSet(std::vector<P>{{0, 1}, {1, 2}}), std::invalid_argument);
  REQUIRE_THROWS_AS(PairSet(std::vector<P>{{0, 1}, {2, 5}}), std::invalid_argument);
  // i > j is normalized to i < j
  PairSet p(std::vector<P>{{1, 0}, {3, 2}});
  REQUIRE(p.pairs()[0] == P{0, 1});
}

namespace {

DesignDistribution two_point_design(std::vector<Allocation> support,
                                    std::vector<double> probs) {
  DesignDistribution d;
  d.kind = DesignKind::Explicit;
  d.n = support.front().size();
  d.support = std::move(support);
  d.probs = Eigen::Map<VectorXd>(probs.data(), static_cast<Index>(probs.size()));
  return d;
}

}  // namespace

TEST_CASE("validate_design checks mirror, balance and normalization") {
  auto ok = two_point_design({alloc({1, -1}), alloc({-1, 1})}, {0.5, 0.5});
  REQUIRE(validate_design(ok, 2).pass());

  auto no_mirror = two_point_design({alloc({1, -1})}, {1.0});
  auto v = validate_design(no_mirror, 2);
  REQUIRE_FALSE(v.pass());
  REQUIRE_FALSE(v.mirror_ok);
  REQUIRE(v.normalized);

  auto mirrored_pair = two_point_design(
      {alloc({1, 1, -1, -1}), alloc({-1, -1, 1, 1})}, {0.5, 0.5});
  REQUIRE(validate_design(mirrored_pair, 4).pass());

  auto unnormalized = two_point_design({alloc({1, -1}), alloc({-1, 1})}, {0.4, 0.5});
  REQUIRE_FALSE(validate_design(unnormalized, 2).normalized);

  REQUIRE_THROWS_AS(validate_design(ok, 4), std::invalid_argument);
}

TEST_CASE("mirror property makes the weighted allocation mean vanish") {
  for (Index n : {4, 6, 8}) {
    auto d = uniform_crfb_design(n);
    VectorXd mean = VectorXd::Zero(n);
    for (std::size_t i = 0; i < d.support.size(); ++i) {
      mean += d.probs[static_cast<Index>(i)] * d.support[i].signs().cast<double>();
    }
    REQUIRE(mean.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("sigma_exact on hand-checkable designs") {
  auto d2 = two_point_design({alloc({1, -1}), alloc({-1, 1})}, {0.5, 0.5});
  MatrixXd expect2(2, 2);
  expect2 << 1, -1, -1, 1;
  REQUIRE((sigma_exact(d2).matrix() - expect2).cwiseAbs().maxCoeff() < 1e-14);

  // Uniform over all six balanced allocations at n=4.
  auto d4 = uniform_crfb_design(4);
  MatrixXd expect4 = (4.0 / 3.0) * MatrixXd::Identity(4, 4) -
                     (1.0 / 3.0) * MatrixXd::Ones(4, 4);
  REQUIRE((sigma_exact(d4).matrix() - expect4).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE((sigma_exact(d4).matrix() - sigma_crfb_closed(4).matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-12);

  // A PB pair collapses to the outer product.
  auto w = alloc({1, -1, -1, 1});
  auto pb = two_point_design({w, w.negated()}, {0.5, 0.5});
  const MatrixXd outer =
      w.signs().cast<double>() * w.signs().cast<double>().transpose();
  REQUIRE((sigma_exact(pb).matrix() - outer).cwiseAbs().maxCoeff() == 0.0);

  auto invalid = two_point_design({alloc({1, -1})}, {1.0});
  REQUIRE_THROWS_AS(sigma_exact(invalid), std::invalid_argument);
}

TEST_CASE("sigma_crfb_closed matches enumeration and its eigenvalues") {
  MatrixXd expect2(2, 2);
  expect2 << 1, -1, -1, 1;
  REQUIRE((sigma_crfb_closed(2).matrix() - expect2).cwiseAbs().maxCoeff() < 1e-14);

  for (Index n : {2, 4, 6, 8, 10}) {
    auto exact = sigma_exact(uniform_crfb_design(n));
    auto closed = sigma_crfb_closed(n);
    REQUIRE((exact.matrix() - closed.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }

  // Frobenius norm at n=20: n + n/(n-1).
  REQUIRE_THAT(sigma_crfb_closed(20).matrix().squaredNorm(),
               WithinAbs(20.0 + 20.0 / 19.0, 1e-10));

  // Spectrum: one zero, n-1 copies of n/(n-1).
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma_crfb_closed(6).matrix(),
                                             Eigen::EigenvaluesOnly);
  REQUIRE_THAT(es.eigenvalues()[0], WithinAbs(0.0, 1e-12));
  for (Index i = 1; i < 6; ++i) {
    REQUIRE_THAT(es.eigenvalues()[i], WithinAbs(6.0 / 5.0, 1e-12));
  }
  REQUIRE_THAT(sigma_crfb_closed(6).lambda_max(), WithinAbs(6.0 / 5.0, 1e-10));

  REQUIRE_THROWS_AS(sigma_crfb_closed(5), std::invalid_argument);
}

TEST_CASE("sigma_pb is the rank-1 outer product") {
  MatrixXd expect2(2, 2);
  expect2 << 1, -1, -1, 1;
  REQUIRE((sigma_pb(alloc({1, -1})).matrix() - expect2).cwiseAbs().maxCoeff() == 0.0);

  rng::Stream s(3);
  for (Index n : {4, 8, 12}) {
    const Allocation w = sample_crfb(n, s);
    auto sigma = sigma_pb(w);
    REQUIRE(sigma.matrix().squaredNorm() == static_cast<double>(n * n));
    REQUIRE_THAT(sigma.lambda_max(), WithinAbs(static_cast<double>(n), 1e-10));
  }
}

TEST_CASE("sigma_pm matches enumeration over within-pair flips") {
  using P = std::pair<Index, Index>;
  MatrixXd expect2(2, 2);
  expect2 << 1, -1, -1, 1;
  REQUIRE((sigma_pm(PairSet(std::vector<P>{{0, 1}})).matrix() - expect2)
              .cwiseAbs()
              .maxCoeff() == 0.0);

  // n=4: two [[1,-1],[-1,1]] blocks, confirmed by averaging the 4 sign flips.
  PairSet pairs4(std::vector<P>{{0, 1}, {2, 3}});
  std::vector<Allocation> flips = {alloc({1, -1, 1, -1}), alloc({1, -1, -1, 1}),
                                   alloc({-1, 1, 1, -1}), alloc({-1, 1, -1, 1})};
  auto d4 = two_point_design(flips, {0.25, 0.25, 0.25, 0.25});
  REQUIRE((sigma_pm(pairs4).matrix() - sigma_exact(d4).matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-14);

  // n=6: Frobenius^2 = 12 (6 unit diagonals + 6 off-diagonal -1 entries).
  PairSet pairs6(std::vector<P>{{0, 1}, {2, 3}, {4, 5}});
  REQUIRE(sigma_pm(pairs6).matrix().squaredNorm() == 12.0);
}

TEST_CASE("every constructed covariance satisfies the shared invariants") {
  std::vector<MatrixXd> sigmas;
  for (Index n : {2, 4, 6, 8, 10}) {
    sigmas.push_back(sigma_crfb_closed(n).matrix());
    sigmas.push_back(sigma_exact(uniform_crfb_design(n)).matrix());
  }
  rng::Stream s(11);
  sigmas.push_back(sigma_pb(sample_crfb(10, s)).matrix());
  sigmas.push_back(
      sigma_pm(PairSet(std::vector<std::pair<Index, Index>>{{0, 3}, {1, 2}, {4, 5}}))
          .matrix());

  for (const MatrixXd& sigma : sigmas) {
    auto checks = AllocationCovariance::validate(sigma);
    INFO(checks.describe());
    REQUIRE(checks.pass());
    REQUIRE(checks.trace_gap < 1e-10);
  }
}

TEST_CASE("AllocationCovariance::checked rejects broken matrices") {
  MatrixXd bad_diag = sigma_crfb_closed(4).matrix();
  bad_diag(0, 0) = 2.0;
  REQUIRE_THROWS_AS(AllocationCovariance::checked(bad_diag), std::invalid_argument);

  MatrixXd asym = sigma_crfb_closed(4).matrix();
  asym(0, 1) += 1e-6;
  REQUIRE_THROWS_AS(AllocationCovariance::checked(asym), std::invalid_argument);

  // Identity has unit diagonal and is PSD but fails Sigma * 1 = 0.
  REQUIRE_THROWS_AS(AllocationCovariance::checked(MatrixXd::Identity(4, 4)),
                    std::invalid_argument);
}

TEST_CASE("ResponseSpec validates its moments") {
  REQUIRE_THROWS_AS(ResponseSpec::with_moments(1.0, VectorXd::Zero(4), -1.0, 0, 0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(ResponseSpec::with_moments(1.0, VectorXd::Zero(4), 1.0, 0, -3.0),
                    std::invalid_argument);
  auto g = ResponseSpec::gaussian(1.0, VectorXd::Ones(4), 1.5);
  REQUIRE(g.sigma2_z == 2.25);
  REQUIRE(g.kappa_z == 0.0);
}
