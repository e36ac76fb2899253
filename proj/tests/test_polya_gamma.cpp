#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "isingimpute/polya_gamma.hpp"
#include "isingimpute/rng.hpp"
#include "support/test_oracles.hpp"

using isingimpute::RngStream;
using isingimpute::pg_mean;
using isingimpute::sample_pg1;

TEST_CASE("pg_mean closed form and limits", "[pg]") {
  REQUIRE(pg_mean(0.0) == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(pg_mean(2.0) == Catch::Approx(std::tanh(1.0) / 4.0).epsilon(1e-12));
  REQUIRE(pg_mean(20.0) ==
          Catch::Approx(std::tanh(10.0) / 40.0).epsilon(1e-12));
  // Even function, continuous through the series switchover.
  RngStream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    const double c = 10.0 * (2.0 * rng.uniform() - 1.0);
    REQUIRE(pg_mean(c) == Catch::Approx(pg_mean(-c)).epsilon(1e-14));
  }
  REQUIRE(pg_mean(9.9e-5) == Catch::Approx(pg_mean(1.01e-4)).epsilon(1e-9));
}

TEST_CASE("sampler mean matches the series oracle at c = 0", "[pg]") {
  // Truncated-series mean with 1e4 terms.
  const double series_mean = test_oracles::SeriesPgSampler::truncated_mean(
      0.0, 10000);
  RngStream rng(2024, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += sample_pg1(0.0, rng);
  }
  REQUIRE(std::abs(sum / n - series_mean) < 0.005);
}

TEST_CASE("sampler mean matches tanh identity over a c grid", "[pg]") {
  const std::vector<double> cs = {0.0, 0.5, 1.0, 2.0, 5.0, 20.0};
  const int n = 100000;
  for (const double c : cs) {
    RngStream rng(99, static_cast<std::uint64_t>(c * 1000));
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_pg1(c, rng);
      REQUIRE(x > 0.0);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    const double mc_err = sd / std::sqrt(static_cast<double>(n));
    INFO("c = " << c);
    REQUIRE(std::abs(mean - pg_mean(c)) < 4.0 * mc_err);
  }
}

TEST_CASE("variance at c = 0 near 1/24", "[pg]") {
  RngStream rng(5, 0);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_pg1(0.0, rng);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  // 1/24 is also what the series representation gives in the limit.
  REQUIRE(test_oracles::SeriesPgSampler::variance(0.0) ==
          Catch::Approx(1.0 / 24.0).epsilon(1e-4));
  REQUIRE(std::abs(var - 1.0 / 24.0) < 0.1 / 24.0);
}

TEST_CASE("KS agreement with the truncated series sampler", "[pg]") {
  for (const double c : {0.0, 2.0}) {
    const int n = 10000;
    test_oracles::SeriesPgSampler series(c, 200);
    RngStream exact_rng(31, 1);
    RngStream series_rng(31, 2);
    std::vector<double> exact(n), approx(n);
    for (int i = 0; i < n; ++i) {
      exact[i] = sample_pg1(c, exact_rng);
      approx[i] = series.draw(series_rng);
    }
    const double p = test_oracles::ks_two_sample_pvalue(exact, approx);
    INFO("c = " << c << ", p = " << p);
    REQUIRE(p > 0.001);
  }
}

TEST_CASE("fixed stream gives bit-identical draw sequences", "[pg]") {
  RngStream a(77, 4);
  RngStream b(77, 4);
  for (int i = 0; i < 2000; ++i) {
    REQUIRE(sample_pg1(1.3, a) == sample_pg1(1.3, b));
  }
}
