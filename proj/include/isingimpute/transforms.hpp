#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isingimpute/model.hpp"

namespace isingimpute {

// Linear maps between vec(S), vech(S) and the columns of S:
//   duplication() * vech(S) == vec(S)            (J^2 x J(J+1)/2)
//   selector(j)   * vech(S) == column j of S     (J x J(J+1)/2)
// Every row of these 0/1 matrices has exactly one 1, so consumers that only
// need scatter indices can use column_index() instead of the dense forms.
class TransformSet {
 public:
  explicit TransformSet(int dim) : dim_(dim) {
    const int q = half_vec_length(dim);
    duplication_ = MatrixXd::Zero(dim * dim, q);
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < dim; ++i) {
        duplication_(j * dim + i, half_vec_index(dim, i, j)) = 1.0;
      }
    }
    selectors_.reserve(dim);
    for (int j = 0; j < dim; ++j) {
      selectors_.push_back(elimination(j) * duplication_);
    }
  }

  int dim() const { return dim_; }
  const MatrixXd& duplication() const { return duplication_; }
  const MatrixXd& selector(int j) const { return selectors_[j]; }

  // E_j: J x J^2 block matrix picking column j out of vec(S).
  MatrixXd elimination(int j) const {
    MatrixXd e = MatrixXd::Zero(dim_, dim_ * dim_);
    e.block(0, j * dim_, dim_, dim_) = MatrixXd::Identity(dim_, dim_);
    return e;
  }

  // Half-vector coordinate hit by row k of selector(j), i.e. the position of
  // s_{kj} in vech(S).
  int column_index(int j, int k) const {
    return half_vec_index(dim_, k, j);
  }

 private:
  int dim_;
  MatrixXd duplication_;
  std::vector<MatrixXd> selectors_;
};

}  // namespace isingimpute
