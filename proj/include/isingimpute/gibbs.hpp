#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "isingimpute/linalg.hpp"
#include "isingimpute/model.hpp"
#include "isingimpute/polya_gamma.hpp"
#include "isingimpute/rng.hpp"
#include "isingimpute/transforms.hpp"

namespace isingimpute {

// Independent mean-zero normal priors: a tight variance for edge weights and
// a weakly informative one for intercepts.
struct PriorSpec {
  double intercept_variance = 100.0;
  double slope_variance = 1.0;

  void validate() const {
    if (!(intercept_variance > 0.0) || !std::isfinite(intercept_variance) ||
        !(slope_variance > 0.0) || !std::isfinite(slope_variance)) {
      throw ValidationError("prior variances must be positive and finite");
    }
  }

  // Prior precision for the length-J coefficient vector of conditional model
  // j (intercept sits at position j).
  VectorXd precision_diag(int dim, int j) const {
    VectorXd d = VectorXd::Constant(dim, 1.0 / slope_variance);
    d[j] = 1.0 / intercept_variance;
    return d;
  }
};

// Gaussian in natural parameterization: the mean and the Cholesky factor of
// the precision matrix, which is all the sampler needs. The covariance is
// only materialized on request, by solving against the identity.
class GaussianPosterior {
 public:
  GaussianPosterior(VectorXd mean, CholeskyFactor precision_cholesky)
      : mean_(std::move(mean)),
        precision_cholesky_(std::move(precision_cholesky)) {}

  const VectorXd& mean() const { return mean_; }
  const CholeskyFactor& precision_cholesky() const {
    return precision_cholesky_;
  }

  MatrixXd covariance() const {
    const Eigen::Index n = mean_.size();
    return precision_cholesky_.solve(MatrixXd::Identity(n, n));
  }

  // mean + L^{-T} z with z standard normal.
  VectorXd sample(RngStream& rng) const {
    VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return mean_ + precision_cholesky_.solve_transposed(z);
  }

 private:
  VectorXd mean_;
  CholeskyFactor precision_cholesky_;
};

namespace detail {

inline void check_complete(const MatrixXd& y) {
  if (((y.array() != 0.0) && (y.array() != 1.0)).any()) {
    throw ValidationError("data matrix must be complete with 0/1 cells");
  }
}

}  // namespace detail

// Design matrix X_j = Y - kappa_j e_j' with kappa_ij = y_ij - 1/2. Column j
// collapses to the constant 1/2, which realizes the s_jj/2 intercept.
inline MatrixXd beta_design(const MatrixXd& y, int j) {
  detail::check_complete(y);
  MatrixXd x = y;
  x.col(j).setConstant(0.5);
  return x;
}

// Conditional Gaussian for the model-j coefficients given augmentation
// weights omega: precision X' D_omega X + D_prior, mean solved from X' kappa.
inline GaussianPosterior beta_posterior(const MatrixXd& y, int j,
                                        const VectorXd& omega,
                                        const PriorSpec& prior) {
  prior.validate();
  if (omega.size() != y.rows() || (omega.array() <= 0.0).any()) {
    throw ValidationError("beta posterior needs one positive omega per row");
  }
  const int dim = static_cast<int>(y.cols());
  const MatrixXd x = beta_design(y, j);
  const VectorXd kappa = y.col(j).array() - 0.5;

  MatrixXd precision = MatrixXd::Zero(dim, dim);
  const MatrixXd xw = omega.array().sqrt().matrix().asDiagonal() * x;
  precision.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose());
  precision = precision.selfadjointView<Eigen::Lower>();
  precision.diagonal() += prior.precision_diag(dim, j);

  CholeskyFactor chol(precision);
  VectorXd mean = chol.solve(x.transpose() * kappa);
  return GaussianPosterior(std::move(mean), std::move(chol));
}

// One transition of the Polya-Gamma chain for the auxiliary coefficients of
// conditional model j: augmentation draws at the logits implied by
// beta_prev, then a Gaussian draw from the implied conditional.
inline VectorXd sample_beta(const MatrixXd& y, int j, const PriorSpec& prior,
                            const VectorXd& beta_prev, RngStream rng) {
  detail::check_complete(y);
  const Eigen::Index n = y.rows();
  // phi_i = beta_jj/2 + sum_{k != j} beta_jk y_ik
  VectorXd phi = y * beta_prev;
  phi -= (y.col(j).array() - 0.5).matrix() * beta_prev[j];

  VectorXd omega(n);
  RngStream omega_rng = rng.sub(stream_tag::kBetaOmega);
  for (Eigen::Index i = 0; i < n; ++i) {
    RngStream cell = omega_rng.sub(static_cast<std::uint64_t>(i));
    omega[i] = sample_pg1(phi[i], cell);
  }
  RngStream gauss = rng.sub(stream_tag::kBetaGauss);
  return beta_posterior(y, j, omega, prior).sample(gauss);
}

// Matrix of conditional logits: entry (i, j) is s_jj/2 + sum_{k!=j} s_jk
// y_ik, assembled as Y S - (Y - 1/2) diag(S) column-scaled.
inline MatrixXd omega_logit_matrix(const MatrixXd& y, const IsingMatrix& s) {
  detail::check_complete(y);
  const int dim = s.dim();
  if (y.cols() != dim) {
    throw ValidationError("omega logits: item count mismatch");
  }
  MatrixXd logits = y * s.values();
  for (int j = 0; j < dim; ++j) {
    logits.col(j) -= (y.col(j).array() - 0.5).matrix() * s(j, j);
  }
  return logits;
}

// Joint conditional for alpha = vech(S) given the N x J augmentation matrix.
// The normal equations are assembled per item and scattered through the
// selector index maps, which avoids materializing the NJ-row stacked design:
//   precision = sum_j T_j' (X_j' D_omega_j X_j + D_prior_j) T_j
//   rhs       = sum_j T_j' X_j' kappa_j
inline GaussianPosterior alpha_posterior(const MatrixXd& y,
                                         const MatrixXd& omega,
                                         const PriorSpec& prior,
                                         const TransformSet& transforms) {
  prior.validate();
  const int dim = transforms.dim();
  if (y.cols() != dim || omega.rows() != y.rows() || omega.cols() != dim) {
    throw ValidationError("alpha posterior: dimension mismatch");
  }
  if ((omega.array() <= 0.0).any()) {
    throw ValidationError("alpha posterior needs positive omega entries");
  }
  const int q = half_vec_length(dim);
  MatrixXd precision = MatrixXd::Zero(q, q);
  VectorXd rhs = VectorXd::Zero(q);
  MatrixXd x(y.rows(), dim);
  MatrixXd block = MatrixXd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    x = y;
    x.col(j).setConstant(0.5);
    const VectorXd kappa = y.col(j).array() - 0.5;
    const MatrixXd xw = omega.col(j).array().sqrt().matrix().asDiagonal() * x;
    block.setZero();
    block.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose());
    block = block.selfadjointView<Eigen::Lower>();
    block.diagonal() += prior.precision_diag(dim, j);
    const VectorXd bj = x.transpose() * kappa;
    for (int k = 0; k < dim; ++k) {
      const int row = transforms.column_index(j, k);
      rhs[row] += bj[k];
      for (int l = 0; l < dim; ++l) {
        precision(row, transforms.column_index(j, l)) += block(k, l);
      }
    }
  }
  CholeskyFactor chol(precision);
  VectorXd mean = chol.solve(rhs);
  return GaussianPosterior(std::move(mean), std::move(chol));
}

// One transition of the joint Polya-Gamma chain for S: an N x J matrix of
// augmentation draws at the logits of s_prev, then one Gaussian draw of
// vech(S).
inline IsingMatrix sample_alpha(const MatrixXd& y, const PriorSpec& prior,
                                const IsingMatrix& s_prev,
                                const TransformSet& transforms,
                                RngStream rng) {
  const int dim = s_prev.dim();
  const MatrixXd logits = omega_logit_matrix(y, s_prev);
  MatrixXd omega(y.rows(), dim);
  RngStream omega_rng = rng.sub(stream_tag::kAlphaOmega);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < dim; ++j) {
      RngStream cell =
          omega_rng.sub(static_cast<std::uint64_t>(i) * dim + j);
      omega(i, j) = sample_pg1(logits(i, j), cell);
    }
  }
  RngStream gauss = rng.sub(stream_tag::kAlphaGauss);
  const VectorXd alpha =
      alpha_posterior(y, omega, prior, transforms).sample(gauss);
  return vech_inverse(HalfVec(dim, alpha));
}

}  // namespace isingimpute
