#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "isingimpute/errors.hpp"
#include "isingimpute/rng.hpp"

namespace isingimpute {

// Cell values of an observed binary response matrix.
enum class Cell : std::int8_t { kZero = 0, kOne = 1, kMissing = -1 };

using CellMatrix =
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

// N x J response matrix with missing cells plus the per-item index sets of
// missing rows. Rows with every cell missing are rejected; callers that
// ingest external files drop such rows before construction.
class ObservedDataset {
 public:
  explicit ObservedDataset(CellMatrix cells) : cells_(std::move(cells)) {
    const Eigen::Index n = cells_.rows();
    const Eigen::Index j = cells_.cols();
    if (j < 1) throw ValidationError("dataset needs at least one item");
    missing_sets_.assign(static_cast<std::size_t>(j), {});
    for (Eigen::Index i = 0; i < n; ++i) {
      int missing_in_row = 0;
      for (Eigen::Index c = 0; c < j; ++c) {
        const std::int8_t v = cells_(i, c);
        if (v == -1) {
          missing_sets_[static_cast<std::size_t>(c)].push_back(
              static_cast<int>(i));
          ++missing_in_row;
        } else if (v != 0 && v != 1) {
          throw ValidationError("dataset cells must be 0, 1 or missing");
        }
      }
      if (missing_in_row == j) {
        throw ValidationError("row " + std::to_string(i) +
                              " is entirely missing");
      }
    }
  }

  int n_rows() const { return static_cast<int>(cells_.rows()); }
  int n_items() const { return static_cast<int>(cells_.cols()); }
  const CellMatrix& cells() const { return cells_; }
  const std::vector<int>& missing_set(int j) const {
    return missing_sets_[static_cast<std::size_t>(j)];
  }

  bool complete() const {
    for (const auto& set : missing_sets_) {
      if (!set.empty()) return false;
    }
    return true;
  }

  std::size_t missing_count() const {
    std::size_t total = 0;
    for (const auto& set : missing_sets_) total += set.size();
    return total;
  }

  // Working copy for the samplers: observed cells as doubles, missing cells
  // filled with fair coin flips from per-cell substreams.
  Eigen::MatrixXd initial_fill(RngStream rng) const {
    Eigen::MatrixXd y(cells_.rows(), cells_.cols());
    for (Eigen::Index i = 0; i < cells_.rows(); ++i) {
      for (Eigen::Index j = 0; j < cells_.cols(); ++j) {
        if (cells_(i, j) == -1) {
          RngStream cell = rng.sub(
              static_cast<std::uint64_t>(i) * cells_.cols() + j);
          y(i, j) = cell.uniform() <= 0.5 ? 1.0 : 0.0;
        } else {
          y(i, j) = static_cast<double>(cells_(i, j));
        }
      }
    }
    return y;
  }

 private:
  CellMatrix cells_;
  std::vector<std::vector<int>> missing_sets_;
};

// Retains exactly the rows with no missing cell.
inline ObservedDataset listwise_delete(const ObservedDataset& data) {
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(data.n_rows()));
  for (int i = 0; i < data.n_rows(); ++i) {
    bool full = true;
    for (int j = 0; j < data.n_items(); ++j) {
      if (data.cells()(i, j) == -1) {
        full = false;
        break;
      }
    }
    if (full) keep.push_back(i);
  }
  if (keep.empty()) {
    throw EmptyCompleteCaseError(
        "listwise deletion removed every row; no complete cases");
  }
  CellMatrix cells(static_cast<Eigen::Index>(keep.size()), data.n_items());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    cells.row(static_cast<Eigen::Index>(r)) = data.cells().row(keep[r]);
  }
  return ObservedDataset(std::move(cells));
}

}  // namespace isingimpute
