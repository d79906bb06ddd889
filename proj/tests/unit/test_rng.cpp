#include <cmath>
#include <vector>

#include "doctest.h"
#include "lpsim/rng.hpp"
#include "oracles.hpp"

using namespace lpsim;

TEST_CASE("derived streams are deterministic functions of (seed, id)") {
  RngStream a = RngStream::derive(42, 7);
  RngStream b = RngStream::derive(42, 7);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different stream ids give different sequences") {
  RngStream a = RngStream::derive(42, 0);
  RngStream b = RngStream::derive(42, 1);
  RngStream c = RngStream::derive(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 16; ++i) {
    const auto va = a.next_u64();
    same_ab += va == b.next_u64() ? 1 : 0;
    same_ac += va == c.next_u64() ? 1 : 0;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("uniform lies in [0, 1) with the right mean") {
  RngStream rng(123);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform(lo, hi) covers the interval") {
  RngStream rng(9);
  double lo_seen = 1e9, hi_seen = -1e9;
  for (int i = 0; i < 5000; ++i) {
    const double u = rng.uniform(-2.0, 3.0);
    REQUIRE(u >= -2.0);
    REQUIRE(u < 3.0);
    lo_seen = std::min(lo_seen, u);
    hi_seen = std::max(hi_seen, u);
  }
  CHECK(lo_seen < -1.9);
  CHECK(hi_seen > 2.9);
}

TEST_CASE("uniform_index is balanced") {
  RngStream rng(77);
  const int n = 30000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) counts[rng.uniform_index(3)] += 1;
  // 4 sigma around n/3 with sigma = sqrt(n p (1-p)) ~ 77.5
  for (const int c : counts) CHECK(std::abs(c - n / 3) < 350);
}

TEST_CASE("bernoulli matches its probability") {
  RngStream rng(5);
  int hits = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.25) ? 1 : 0;
  // sigma = sqrt(n * .25 * .75) ~ 86.6; allow 4.6 sigma
  CHECK(std::abs(hits - n / 4) < 400);
}

TEST_CASE("normal has standard moments and passes a KS test") {
  RngStream rng(2024);
  const int n = 100000;
  std::vector<double> draws(n);
  double sum = 0.0, sum2 = 0.0;
  for (double& d : draws) {
    d = rng.normal();
    sum += d;
    sum2 += d * d;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::fabs(mean) < 0.015);
  CHECK(sd == doctest::Approx(1.0).epsilon(0.01));

  const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  CHECK(oracles::ks_stat(draws, phi) < oracles::ks_crit_01(draws.size()));
}

TEST_CASE("lognormal transform recovers its parameters") {
  RngStream rng(31);
  const double s = 0.8, mu = 2.0, lambda = 0.77;
  const int n = 50000;
  double zsum = 0.0, zsum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = rng.lognormal(s, mu, lambda);
    REQUIRE(t > mu);  // support is (mu, inf)
    const double z = std::log((t - mu) / lambda) / s;
    zsum += z;
    zsum2 += z * z;
  }
  const double zmean = zsum / n;
  const double zsd = std::sqrt(zsum2 / n - zmean * zmean);
  CHECK(std::fabs(zmean) < 0.02);
  CHECK(zsd == doctest::Approx(1.0).epsilon(0.015));
}
