#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

#include "isingimpute/gibbs.hpp"
#include "isingimpute/rng.hpp"
#include "support/test_oracles.hpp"

using namespace isingimpute;

namespace {

MatrixXd random_binary_matrix(int n, int dim, RngStream& rng) {
  MatrixXd y(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) y(i, j) = rng.uniform() <= 0.5 ? 1.0 : 0.0;
  }
  return y;
}

}  // namespace

TEST_CASE("beta design fixes column j at one half", "[gibbs]") {
  MatrixXd y(2, 3);
  y << 1, 0, 1, 0, 1, 1;
  const MatrixXd x = beta_design(y, 0);
  REQUIRE(x(0, 0) == 0.5);
  REQUIRE(x(0, 1) == 0.0);
  REQUIRE(x(0, 2) == 1.0);
  REQUIRE(x(1, 0) == 0.5);
  REQUIRE(x(1, 1) == 1.0);
  REQUIRE(x(1, 2) == 1.0);

  RngStream rng(71, 0);
  const MatrixXd big = random_binary_matrix(40, 5, rng);
  for (int j = 0; j < 5; ++j) {
    REQUIRE((beta_design(big, j).col(j).array() == 0.5).all());
  }
  MatrixXd bad = big;
  bad(3, 2) = -1.0;
  REQUIRE_THROWS_AS(beta_design(bad, 0), ValidationError);
}

TEST_CASE("beta posterior with no data returns the prior", "[gibbs]") {
  const MatrixXd empty(0, 3);
  PriorSpec prior;
  const GaussianPosterior post =
      beta_posterior(empty, 1, VectorXd(0), prior);
  REQUIRE(post.mean().isZero(0.0));
  const MatrixXd cov = post.covariance();
  REQUIRE(cov(0, 0) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(cov(1, 1) == Catch::Approx(100.0).epsilon(1e-12));
  REQUIRE(cov(2, 2) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(std::abs(cov(0, 1)) < 1e-14);
}

TEST_CASE("beta posterior single-cell hand case", "[gibbs]") {
  MatrixXd y(1, 1);
  y << 1.0;
  VectorXd omega(1);
  omega << 0.25;
  PriorSpec prior;  // intercept variance 100
  const GaussianPosterior post = beta_posterior(y, 0, omega, prior);
  const double sigma = 1.0 / (0.25 * 0.25 + 0.01);
  REQUIRE(post.covariance()(0, 0) == Catch::Approx(sigma).epsilon(1e-12));
  REQUIRE(post.mean()[0] == Catch::Approx(sigma * 0.25).epsilon(1e-12));
}

TEST_CASE("beta posterior covariance is SPD", "[gibbs]") {
  RngStream rng(73, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5 + static_cast<int>(rng.below(30));
    const int dim = 2 + static_cast<int>(rng.below(5));
    const MatrixXd y = random_binary_matrix(n, dim, rng);
    VectorXd omega(n);
    for (int i = 0; i < n; ++i) omega[i] = 0.01 + rng.uniform();
    const GaussianPosterior post = beta_posterior(y, 0, omega, {});
    const MatrixXd cov = post.covariance();
    REQUIRE((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    REQUIRE(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("omega logits equal per-cell conditional logits", "[gibbs]") {
  MatrixXd y(1, 2);
  y << 0.0, 1.0;
  MatrixXd s2(2, 2);
  s2 << 2.0, 1.0, 1.0, 0.0;
  const MatrixXd logits = omega_logit_matrix(y, IsingMatrix(s2));
  REQUIRE(logits(0, 0) == Catch::Approx(2.0));
  REQUIRE(logits(0, 1) == Catch::Approx(0.0));

  REQUIRE(omega_logit_matrix(y, IsingMatrix(2)).isZero(0.0));

  RngStream rng(79, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(50));
    const int dim = 2 + static_cast<int>(rng.below(7));
    const IsingMatrix s = test_oracles::random_symmetric(dim, 1.0, rng);
    const MatrixXd data = random_binary_matrix(n, dim, rng);
    const MatrixXd all = omega_logit_matrix(data, s);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < dim; ++j) {
        const VectorXd row_j = s.values().row(j);
        const VectorXd data_row = data.row(i);
        REQUIRE(all(i, j) ==
                Catch::Approx(conditional_logit(j, data_row, row_j))
                    .margin(1e-12));
      }
    }
  }
}

TEST_CASE("alpha posterior prior-only covariance", "[gibbs]") {
  const MatrixXd empty(0, 3);
  const MatrixXd omega(0, 3);
  const TransformSet transforms(3);
  const GaussianPosterior post =
      alpha_posterior(empty, omega, {}, transforms);
  const MatrixXd cov = post.covariance();
  // vech order (s11, s21, s31, s22, s32, s33): intercept coordinates get
  // sigma2^2, edge coordinates appear in two selector blocks so their prior
  // precision doubles.
  REQUIRE(cov(0, 0) == Catch::Approx(100.0).epsilon(1e-12));
  REQUIRE(cov(1, 1) == Catch::Approx(0.5).epsilon(1e-12));
  REQUIRE(cov(2, 2) == Catch::Approx(0.5).epsilon(1e-12));
  REQUIRE(cov(3, 3) == Catch::Approx(100.0).epsilon(1e-12));
  REQUIRE(cov(4, 4) == Catch::Approx(0.5).epsilon(1e-12));
  REQUIRE(cov(5, 5) == Catch::Approx(100.0).epsilon(1e-12));
  REQUIRE(post.mean().isZero(0.0));
}

TEST_CASE("alpha posterior shapes", "[gibbs]") {
  RngStream rng(83, 0);
  const MatrixXd y = random_binary_matrix(4, 6, rng);
  const MatrixXd omega = MatrixXd::Constant(4, 6, 0.25);
  const GaussianPosterior post = alpha_posterior(y, omega, {},
                                                 TransformSet(6));
  REQUIRE(post.mean().size() == 21);
  REQUIRE(post.covariance().rows() == 21);
}

TEST_CASE("alpha posterior matches dense stacked-design oracle", "[gibbs]") {
  // Direct formation with explicit M, D_omega, T and dense inversion.
  RngStream rng(89, 0);
  for (const int dim : {2, 3}) {
    const int n = dim == 2 ? 1 : 5;
    const int q = half_vec_length(dim);
    const MatrixXd y = random_binary_matrix(n, dim, rng);
    MatrixXd omega(n, dim);
    if (dim == 2) {
      omega.setConstant(0.25);
    } else {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < dim; ++j) omega(i, j) = 0.05 + rng.uniform();
      }
    }
    const TransformSet transforms(dim);
    PriorSpec prior;

    MatrixXd m(n * dim, q);
    VectorXd kappa_stack(n * dim);
    MatrixXd d_omega = MatrixXd::Zero(n * dim, n * dim);
    MatrixXd d_prior = MatrixXd::Zero(dim * dim, dim * dim);
    MatrixXd t_stack(dim * dim, q);
    for (int j = 0; j < dim; ++j) {
      const MatrixXd xj = beta_design(y, j);
      m.block(j * n, 0, n, q) = xj * transforms.selector(j);
      kappa_stack.segment(j * n, n) = y.col(j).array() - 0.5;
      d_omega.block(j * n, j * n, n, n) = omega.col(j).asDiagonal();
      t_stack.block(j * dim, 0, dim, q) = transforms.selector(j);
      d_prior.block(j * dim, j * dim, dim, dim) =
          MatrixXd(prior.precision_diag(dim, j).asDiagonal());
    }
    const MatrixXd precision =
        m.transpose() * d_omega * m + t_stack.transpose() * d_prior * t_stack;
    const MatrixXd cov_expected = precision.inverse();
    const VectorXd mean_expected =
        cov_expected * (m.transpose() * kappa_stack);

    const GaussianPosterior post = alpha_posterior(y, omega, prior,
                                                   transforms);
    REQUIRE((post.covariance() - cov_expected).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((post.mean() - mean_expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("alpha posterior reduces to beta posterior at J = 1", "[gibbs]") {
  RngStream rng(97, 0);
  MatrixXd y(20, 1);
  for (int i = 0; i < 20; ++i) y(i, 0) = rng.uniform() <= 0.6 ? 1.0 : 0.0;
  VectorXd omega(20);
  for (int i = 0; i < 20; ++i) omega[i] = 0.05 + rng.uniform();
  const GaussianPosterior a =
      alpha_posterior(y, omega, {}, TransformSet(1));
  const GaussianPosterior b = beta_posterior(y, 0, omega, {});
  REQUIRE(a.mean()[0] == Catch::Approx(b.mean()[0]).epsilon(1e-13));
  REQUIRE(a.covariance()(0, 0) ==
          Catch::Approx(b.covariance()(0, 0)).epsilon(1e-13));
}

TEST_CASE("samplers are deterministic under a fixed stream", "[gibbs]") {
  RngStream rng(101, 0);
  const MatrixXd y = random_binary_matrix(30, 3, rng);
  const VectorXd beta_prev = VectorXd::Constant(3, 0.1);
  const VectorXd b1 = sample_beta(y, 1, {}, beta_prev, RngStream(5, 9));
  const VectorXd b2 = sample_beta(y, 1, {}, beta_prev, RngStream(5, 9));
  REQUIRE(b1 == b2);

  const IsingMatrix s_prev = test_oracles::random_symmetric(3, 0.3, rng);
  const TransformSet transforms(3);
  const IsingMatrix s1 =
      sample_alpha(y, {}, s_prev, transforms, RngStream(6, 2));
  const IsingMatrix s2 =
      sample_alpha(y, {}, s_prev, transforms, RngStream(6, 2));
  REQUIRE(s1.values() == s2.values());
  const MatrixXd transposed = s1.values().transpose();
  REQUIRE(s1.values() == transposed);
}

TEST_CASE("degenerate column stays finite under the prior", "[gibbs]") {
  // Every response positive: the intercept wants +infinity, the prior caps
  // the excursion.
  MatrixXd y = MatrixXd::Ones(2000, 2);
  RngStream rng(103, 0);
  for (int i = 0; i < 2000; ++i) y(i, 1) = rng.uniform() <= 0.5 ? 1.0 : 0.0;
  VectorXd beta = VectorXd::Zero(2);
  RngStream chain(11, 0);
  double max_intercept = 0.0;
  for (int t = 0; t < 300; ++t) {
    beta = sample_beta(y, 0, {}, beta, chain.sub(t));
    REQUIRE(std::isfinite(beta[0]));
    REQUIRE(std::isfinite(beta[1]));
    max_intercept = std::max(max_intercept, beta[0]);
  }
  REQUIRE(max_intercept > 2.0);   // pushed well into positive territory
  REQUIRE(max_intercept < 60.0);  // 2 * sqrt(intercept variance) * 3
}

TEST_CASE("sample_alpha cost grows benignly with N", "[gibbs]") {
  RngStream rng(109, 0);
  const MatrixXd y_small = random_binary_matrix(1000, 6, rng);
  const MatrixXd y_large = random_binary_matrix(2000, 6, rng);
  const TransformSet transforms(6);
  const IsingMatrix s = test_oracles::random_symmetric(6, 0.4, rng);
  const auto time_calls = [&](const MatrixXd& y) {
    const auto start = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 5; ++rep) {
      sample_alpha(y, {}, s, transforms, RngStream(1, rep));
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  time_calls(y_small);  // warm-up
  const double t_small = time_calls(y_small);
  const double t_large = time_calls(y_large);
  INFO("t(N=1000) = " << t_small << " s, t(N=2000) = " << t_large << " s");
  REQUIRE(t_large < 10.0 * t_small);
}

TEST_CASE("beta chain long-run mean matches grid quadrature", "[gibbs]") {
  // Small fixed dataset; the rigorous version runs in the acceptance suite.
  RngStream data_rng(107, 0);
  const int n = 100;
  MatrixXd y(n, 2);
  for (int i = 0; i < n; ++i) {
    y(i, 1) = data_rng.uniform() <= 0.5 ? 1.0 : 0.0;
    y(i, 0) = data_rng.uniform() <= sigmoid(-0.3 + 0.8 * y(i, 1)) ? 1.0 : 0.0;
  }
  PriorSpec prior;
  const auto log_post = [&](const Eigen::Vector2d& beta) {
    double lp = -0.5 * beta[0] * beta[0] / prior.intercept_variance -
                0.5 * beta[1] * beta[1] / prior.slope_variance;
    for (int i = 0; i < n; ++i) {
      const double phi = 0.5 * beta[0] + beta[1] * y(i, 1);
      lp += y(i, 0) * phi - log1p_exp(phi);
    }
    return lp;
  };
  const Eigen::Vector2d expected =
      test_oracles::grid_posterior_mean<2>(log_post, -6.0, 6.0, 81, 201,
                                           25.0);

  VectorXd beta = VectorXd::Zero(2);
  RngStream chain(13, 0);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  const int sweeps = 6000, burn = 1000;
  for (int t = 1; t <= sweeps; ++t) {
    beta = sample_beta(y, 0, prior, beta, chain.sub(t));
    if (t > burn) mean += beta;
  }
  mean /= sweeps - burn;
  REQUIRE(std::abs(mean[0] - expected[0]) < 0.12);
  REQUIRE(std::abs(mean[1] - expected[1]) < 0.12);
}
