#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "isingimpute/datagen.hpp"
#include "isingimpute/model.hpp"
#include "isingimpute/rng.hpp"
#include "support/test_oracles.hpp"

using namespace isingimpute;

TEST_CASE("normalizing constant closed forms", "[model]") {
  REQUIRE(normalizing_constant(IsingMatrix(3)) == Catch::Approx(8.0));

  IsingMatrix one(1);
  one.set(0, 0, 2.0 * std::log(3.0));
  REQUIRE(normalizing_constant(one) == Catch::Approx(4.0).epsilon(1e-13));

  // Brute-force enumeration of all 64 pattern weights for the six-item
  // screening-study matrix.
  const IsingMatrix s0 = load_true_parameters(StudyId::kStudyII);
  double brute = 0.0;
  for (int bits = 0; bits < 64; ++bits) {
    VectorXd y(6);
    for (int j = 0; j < 6; ++j) y[j] = (bits >> j) & 1;
    brute += std::exp(0.5 * y.dot(s0.values() * y));
  }
  REQUIRE(normalizing_constant(s0) == Catch::Approx(brute).epsilon(1e-12));
}

TEST_CASE("normalizing constant rejects oversized dimensions", "[model]") {
  REQUIRE_THROWS_AS(normalizing_constant(IsingMatrix(21)), ValidationError);
}

TEST_CASE("log pmf values and normalization", "[model]") {
  IsingMatrix uniform4(4);
  VectorXd y = VectorXd::Zero(4);
  y[2] = 1.0;
  REQUIRE(log_pmf(y, uniform4) ==
          Catch::Approx(std::log(1.0 / 16.0)).epsilon(1e-13));

  IsingMatrix pair(2);
  pair.set(0, 1, std::log(2.0));
  VectorXd y11(2);
  y11 << 1.0, 1.0;
  REQUIRE(log_pmf(y11, pair) ==
          Catch::Approx(std::log(2.0 / 5.0)).epsilon(1e-13));

  RngStream rng(17, 0);
  for (const int dim : {2, 5, 10}) {
    const IsingMatrix s = test_oracles::random_symmetric(dim, 1.5, rng);
    double total = 0.0;
    for (int bits = 0; bits < (1 << dim); ++bits) {
      VectorXd pattern(dim);
      for (int j = 0; j < dim; ++j) pattern[j] = (bits >> j) & 1;
      total += std::exp(log_pmf(pattern, s));
    }
    REQUIRE(total == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("log pmf input validation", "[model]") {
  IsingMatrix s(3);
  VectorXd bad(3);
  bad << 0.0, 2.0, 1.0;
  REQUIRE_THROWS_AS(log_pmf(bad, s), ValidationError);
  REQUIRE_THROWS_AS(log_pmf(VectorXd::Zero(2), s), ValidationError);
}

TEST_CASE("conditional probabilities equal joint ratios", "[model]") {
  REQUIRE(conditional_success_prob(0, VectorXd::Zero(3), VectorXd::Zero(3)) ==
          Catch::Approx(0.5));

  VectorXd row(2), y(2);
  row << 0.0, std::log(3.0);
  y << 0.0, 1.0;
  REQUIRE(conditional_success_prob(0, y, row) ==
          Catch::Approx(0.75).epsilon(1e-14));

  RngStream rng(23, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + static_cast<int>(rng.below(7));
    const IsingMatrix s = test_oracles::random_symmetric(dim, 1.2, rng);
    VectorXd pattern = test_oracles::random_binary_vector(dim, rng);
    for (int j = 0; j < dim; ++j) {
      VectorXd hi = pattern, lo = pattern;
      hi[j] = 1.0;
      lo[j] = 0.0;
      const double p_hi = std::exp(log_pmf(hi, s));
      const double p_lo = std::exp(log_pmf(lo, s));
      const double expected = p_hi / (p_hi + p_lo);
      const VectorXd row_j = s.values().row(j);
      REQUIRE(conditional_success_prob(j, pattern, row_j) ==
              Catch::Approx(expected).margin(1e-12));
    }
  }
}

TEST_CASE("pseudo log likelihood", "[model]") {
  // Zero matrix: every conditional is a fair coin.
  MatrixXd y(5, 3);
  y << 1, 0, 1, 0, 0, 0, 1, 1, 1, 0, 1, 0, 1, 1, 0;
  REQUIRE(pseudo_log_likelihood(y, IsingMatrix(3)) ==
          Catch::Approx(15.0 * std::log(0.5)).epsilon(1e-13));

  // Hand evaluation at J=2, y=(1,0), s12 = 1.
  IsingMatrix pair(2);
  pair.set(0, 1, 1.0);
  MatrixXd row(1, 2);
  row << 1.0, 0.0;
  const double expected =
      std::log(sigmoid(0.0)) + std::log(1.0 - sigmoid(1.0));
  REQUIRE(pseudo_log_likelihood(row, pair) ==
          Catch::Approx(expected).epsilon(1e-13));

  // Single random row: sum of conditional log-probs via joint ratios.
  RngStream rng(29, 0);
  const int dim = 4;
  const IsingMatrix s = test_oracles::random_symmetric(dim, 1.0, rng);
  MatrixXd single(1, dim);
  const VectorXd pattern = test_oracles::random_binary_vector(dim, rng);
  single.row(0) = pattern;
  double expected_ll = 0.0;
  for (int j = 0; j < dim; ++j) {
    VectorXd hi = pattern, lo = pattern;
    hi[j] = 1.0;
    lo[j] = 0.0;
    const double p_hi = std::exp(log_pmf(hi, s));
    const double p_lo = std::exp(log_pmf(lo, s));
    const double p1 = p_hi / (p_hi + p_lo);
    expected_ll += pattern[j] == 1.0 ? std::log(p1) : std::log(1.0 - p1);
  }
  REQUIRE(pseudo_log_likelihood(single, s) ==
          Catch::Approx(expected_ll).margin(1e-12));

  MatrixXd with_missing(1, 2);
  with_missing << 1.0, -1.0;
  REQUIRE_THROWS_AS(pseudo_log_likelihood(with_missing, IsingMatrix(2)),
                    ValidationError);
}

TEST_CASE("vech round trip and ordering", "[model]") {
  MatrixXd m(2, 2);
  m << 1.5, -2.0, -2.0, 3.25;
  const HalfVec alpha = vech(IsingMatrix(m));
  REQUIRE(alpha.values()[0] == 1.5);
  REQUIRE(alpha.values()[1] == -2.0);
  REQUIRE(alpha.values()[2] == 3.25);

  RngStream rng(31, 0);
  for (const int dim : {1, 2, 3, 6, 9}) {
    const IsingMatrix s = test_oracles::random_symmetric(dim, 2.0, rng);
    const IsingMatrix back = vech_inverse(vech(s));
    REQUIRE(back.values() == s.values());
  }

  REQUIRE_THROWS_AS(HalfVec(3, VectorXd::Zero(5)), ValidationError);
}

TEST_CASE("pmf invariant under symmetric permutation of items", "[model]") {
  RngStream rng(37, 0);
  const int dim = 5;
  const IsingMatrix s = test_oracles::random_symmetric(dim, 1.0, rng);
  std::vector<int> perm = {3, 0, 4, 1, 2};
  MatrixXd permuted(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      permuted(i, j) = s(perm[i], perm[j]);
    }
  }
  const IsingMatrix sp(permuted);
  for (int trial = 0; trial < 30; ++trial) {
    const VectorXd y = test_oracles::random_binary_vector(dim, rng);
    VectorXd yp(dim);
    for (int i = 0; i < dim; ++i) yp[i] = y[perm[i]];
    REQUIRE(log_pmf(yp, sp) == Catch::Approx(log_pmf(y, s)).margin(1e-12));
  }
}

TEST_CASE("matrix type rejects asymmetry beyond tolerance", "[model]") {
  MatrixXd bad(2, 2);
  bad << 0.0, 1.0, -1.0, 0.0;
  REQUIRE_THROWS_AS(IsingMatrix(bad), ValidationError);
}
