#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "isingimpute/errors.hpp"

namespace isingimpute {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Lower Cholesky factor of a symmetric positive definite matrix; the entry
// point for every linear solve in the samplers. A non-positive pivot raises
// SpdError with the offending index.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const MatrixXd& a) : l_(a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw ValidationError("Cholesky input must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      double pivot = l_(k, k) - l_.row(k).head(k).squaredNorm();
      if (!(pivot > 0.0) || !std::isfinite(pivot)) {
        throw SpdError("matrix is not positive definite at pivot " +
                           std::to_string(k),
                       static_cast<int>(k));
      }
      pivot = std::sqrt(pivot);
      l_(k, k) = pivot;
      for (Eigen::Index i = k + 1; i < n; ++i) {
        l_(i, k) =
            (l_(i, k) - l_.row(i).head(k).dot(l_.row(k).head(k))) / pivot;
      }
    }
    l_.triangularView<Eigen::StrictlyUpper>().setZero();
  }

  const MatrixXd& lower() const { return l_; }

  // Solves (L L') x = b for a vector or matrix right-hand side.
  template <typename Derived>
  typename Derived::PlainObject solve(
      const Eigen::MatrixBase<Derived>& b) const {
    typename Derived::PlainObject x =
        l_.triangularView<Eigen::Lower>().solve(b.derived());
    l_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }

  // Solves L' x = z; with z standard normal this turns the factor of a
  // precision matrix into a draw with the matching covariance.
  VectorXd solve_transposed(const VectorXd& z) const {
    return l_.transpose().triangularView<Eigen::Upper>().solve(z);
  }

 private:
  MatrixXd l_;
};

// A^{-1} B through one factorization and two triangular solves.
template <typename Derived>
typename Derived::PlainObject spd_solve(const MatrixXd& a,
                                        const Eigen::MatrixBase<Derived>& b) {
  if (a.rows() != b.rows()) {
    throw ValidationError("spd_solve: dimension mismatch");
  }
  return CholeskyFactor(a).solve(b);
}

}  // namespace isingimpute
