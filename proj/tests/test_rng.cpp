#include "twoarm/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

using namespace twoarm;

TEST_CASE("streams are deterministic in (seed, path, counter)") {
  rng::Stream a = rng::substream(42, {rng::tag::kZDraw, 7});
  rng::Stream b = rng::substream(42, {rng::tag::kZDraw, 7});
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct paths give distinct streams") {
  REQUIRE(rng::derive_key(1, {2, 3}) != rng::derive_key(1, {3, 2}));
  REQUIRE(rng::derive_key(1, {2}) != rng::derive_key(2, {2}));
  rng::Stream a = rng::substream(9, {rng::tag::kWDraw, 0});
  rng::Stream b = rng::substream(9, {rng::tag::kWDraw, 1});
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
  REQUIRE(equal == 0);
}

TEST_CASE("uniform01 stays in [0,1) with mean near 1/2") {
  rng::Stream s(123);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  const double se = std::sqrt(1.0 / 12.0 / n);
  REQUIRE(std::abs(sum / n - 0.5) < 3.0 * se);
}

TEST_CASE("normal draws have the right first four moments") {
  rng::Stream s(7);
  const int n = 200000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = s.next_normal();
    m1 += g;
    m2 += g * g;
    m3 += g * g * g;
    m4 += g * g * g * g;
  }
  m1 /= n; m2 /= n; m3 /= n; m4 /= n;
  REQUIRE(std::abs(m1) < 3.0 / std::sqrt(static_cast<double>(n)));
  REQUIRE(std::abs(m2 - 1.0) < 3.0 * std::sqrt(2.0 / n));
  REQUIRE(std::abs(m3) < 3.0 * std::sqrt(15.0 / n));
  REQUIRE(std::abs(m4 - 3.0) < 3.0 * std::sqrt(96.0 / n));
}

TEST_CASE("next_below respects its bound and covers all values") {
  rng::Stream s(55);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = s.next_below(6);
    REQUIRE(v < 6);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 6);
}
