#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "isingimpute/errors.hpp"

namespace isingimpute {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Exact enumeration is restricted to dimensions where 2^J stays around a
// million patterns.
constexpr int kMaxEnumerationDim = 20;

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double log1p_exp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline int half_vec_length(int dim) { return dim * (dim + 1) / 2; }

// Position of s_{ij} (0-based, any order of i and j) in the half-vectorized
// layout (s_11, ..., s_J1, s_22, ..., s_J2, ..., s_JJ).
inline int half_vec_index(int dim, int i, int j) {
  if (i < j) std::swap(i, j);
  return j * dim - j * (j - 1) / 2 + (i - j);
}

// Symmetric J x J parameter matrix of the binary pairwise model: diagonal
// entries act as intercepts (entering conditional logits as s_jj / 2),
// off-diagonal entries are edge weights.
class IsingMatrix {
 public:
  explicit IsingMatrix(int dim) : values_(MatrixXd::Zero(dim, dim)) {
    if (dim < 1) throw ValidationError("IsingMatrix dimension must be >= 1");
  }

  // Accepts any matrix whose asymmetry is pure floating-point noise and
  // stores the exactly symmetrized version.
  explicit IsingMatrix(const MatrixXd& values, double symmetry_tol = 1e-9)
      : values_(values) {
    if (values.rows() != values.cols() || values.rows() < 1) {
      throw ValidationError("IsingMatrix must be square with dim >= 1");
    }
    const double gap = (values - values.transpose()).cwiseAbs().maxCoeff();
    if (gap > symmetry_tol) {
      throw ValidationError("IsingMatrix input is not symmetric (max gap " +
                            std::to_string(gap) + ")");
    }
    if (gap > 0.0) {
      values_ = 0.5 * (values + values.transpose());
    }
  }

  int dim() const { return static_cast<int>(values_.rows()); }
  const MatrixXd& values() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

  // Symmetric assignment of s_ij = s_ji.
  void set(int i, int j, double v) {
    values_(i, j) = v;
    values_(j, i) = v;
  }

 private:
  MatrixXd values_;
};

// Half-vectorization of a symmetric matrix, alpha = vech(S).
class HalfVec {
 public:
  HalfVec(int dim, VectorXd values) : dim_(dim), values_(std::move(values)) {
    if (values_.size() != half_vec_length(dim)) {
      throw ValidationError("HalfVec length must be J(J+1)/2");
    }
  }

  int dim() const { return dim_; }
  const VectorXd& values() const { return values_; }
  double operator[](int k) const { return values_[k]; }

 private:
  int dim_;
  VectorXd values_;
};

inline HalfVec vech(const IsingMatrix& s) {
  const int dim = s.dim();
  VectorXd out(half_vec_length(dim));
  for (int j = 0; j < dim; ++j) {
    for (int i = j; i < dim; ++i) {
      out[half_vec_index(dim, i, j)] = s(i, j);
    }
  }
  return HalfVec(dim, std::move(out));
}

inline IsingMatrix vech_inverse(const HalfVec& alpha) {
  const int dim = alpha.dim();
  IsingMatrix s(dim);
  for (int j = 0; j < dim; ++j) {
    for (int i = j; i < dim; ++i) {
      s.set(i, j, alpha[half_vec_index(dim, i, j)]);
    }
  }
  return s;
}

namespace detail {

inline void check_enumeration_dim(int dim) {
  if (dim > kMaxEnumerationDim) {
    throw ValidationError("exact enumeration supports J <= " +
                          std::to_string(kMaxEnumerationDim) + ", got J = " +
                          std::to_string(dim));
  }
}

}  // namespace detail

// Visits every pattern y in {0,1}^J in Gray-code order and calls
// f(bits, energy) with energy = y' S y / 2. The single-bit updates keep the
// sweep at O(J) per pattern.
template <typename F>
void for_each_pattern_energy(const IsingMatrix& s, F&& f) {
  const int dim = s.dim();
  detail::check_enumeration_dim(dim);
  const std::uint64_t count = std::uint64_t{1} << dim;
  std::uint32_t bits = 0;
  double energy = 0.0;
  f(bits, energy);
  for (std::uint64_t k = 1; k < count; ++k) {
    const int flip = __builtin_ctzll(k);  // Gray code flips this bit.
    // Energy delta for toggling y_flip: s_jj/2 plus interactions with the
    // currently active coordinates.
    double delta = 0.5 * s(flip, flip);
    std::uint32_t rest = bits & ~(std::uint32_t{1} << flip);
    while (rest != 0) {
      const int j = __builtin_ctz(rest);
      rest &= rest - 1;
      delta += s(flip, j);
    }
    const std::uint32_t bit = std::uint32_t{1} << flip;
    energy += (bits & bit) ? -delta : delta;
    bits ^= bit;
    f(bits, energy);
  }
}

// log c(S): streaming log-sum-exp over all 2^J pattern energies.
inline double log_normalizing_constant(const IsingMatrix& s) {
  double max_seen = 0.0;  // pattern y = 0 contributes energy 0
  double sum = 0.0;
  for_each_pattern_energy(s, [&](std::uint32_t, double energy) {
    if (energy <= max_seen) {
      sum += std::exp(energy - max_seen);
    } else {
      sum = sum * std::exp(max_seen - energy) + 1.0;
      max_seen = energy;
    }
  });
  return max_seen + std::log(sum);
}

inline double normalizing_constant(const IsingMatrix& s) {
  return std::exp(log_normalizing_constant(s));
}

namespace detail {

inline void check_binary_pattern(const VectorXd& y, int dim) {
  if (y.size() != dim) {
    throw ValidationError("pattern length does not match model dimension");
  }
  for (int j = 0; j < dim; ++j) {
    if (y[j] != 0.0 && y[j] != 1.0) {
      throw ValidationError("pattern entries must be 0 or 1");
    }
  }
}

}  // namespace detail

inline double log_pmf(const VectorXd& y, const IsingMatrix& s) {
  detail::check_binary_pattern(y, s.dim());
  return 0.5 * y.dot(s.values() * y) - log_normalizing_constant(s);
}

// P(Y_j = 1 | Y_{-j} = y_{-j}) = sigmoid(s_jj / 2 + sum_{k != j} s_jk y_k).
// `row` is row j of S; y_j itself is ignored.
inline double conditional_logit(int j, const VectorXd& y, const VectorXd& row) {
  if (y.size() != row.size()) {
    throw ValidationError("conditional logit: dimension mismatch");
  }
  double logit = 0.5 * row[j];
  for (int k = 0; k < row.size(); ++k) {
    if (k != j) logit += row[k] * y[k];
  }
  return logit;
}

inline double conditional_success_prob(int j, const VectorXd& y,
                                       const VectorXd& row) {
  return sigmoid(conditional_logit(j, y, row));
}

// Sum over rows and items of the log conditional likelihood; requires a
// complete data matrix.
inline double pseudo_log_likelihood(const MatrixXd& y, const IsingMatrix& s) {
  const int dim = s.dim();
  if (y.cols() != dim) {
    throw ValidationError("pseudo likelihood: item count mismatch");
  }
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < dim; ++j) {
      const double cell = y(i, j);
      if (cell != 0.0 && cell != 1.0) {
        throw ValidationError("pseudo likelihood requires complete 0/1 data");
      }
      double logit = 0.5 * s(j, j);
      for (int k = 0; k < dim; ++k) {
        if (k != j) logit += s(j, k) * y(i, k);
      }
      ll += cell * logit - log1p_exp(logit);
    }
  }
  return ll;
}

}  // namespace isingimpute
