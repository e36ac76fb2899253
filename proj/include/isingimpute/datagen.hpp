#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "isingimpute/dataset.hpp"
#include "isingimpute/model.hpp"
#include "isingimpute/rng.hpp"

namespace isingimpute {

// Exact i.i.d. sampling by enumerating all 2^J pattern probabilities and
// inverting the CDF; the table is ~0.5 MB at the J = 16 bound.
constexpr int kMaxExactSamplingDim = 16;

inline MatrixXd sample_ising_exact(const IsingMatrix& s, int n_rows,
                                   RngStream rng) {
  const int dim = s.dim();
  if (dim > kMaxExactSamplingDim) {
    throw ValidationError(
        "exact sampling supports J <= " +
        std::to_string(kMaxExactSamplingDim) +
        "; use the Gibbs generator for larger models");
  }
  const std::size_t count = std::size_t{1} << dim;
  std::vector<double> energy(count);
  for_each_pattern_energy(
      s, [&](std::uint32_t bits, double e) { energy[bits] = e; });
  const double log_c = log_normalizing_constant(s);
  std::vector<double> cdf(count);
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    acc += std::exp(energy[k] - log_c);
    cdf[k] = acc;
  }
  cdf.back() = 1.0;  // guard against rounding in the final bucket

  MatrixXd y(n_rows, dim);
  for (int i = 0; i < n_rows; ++i) {
    RngStream row_rng = rng.sub(static_cast<std::uint64_t>(i));
    const double u = row_rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto bits =
        static_cast<std::uint32_t>(std::distance(cdf.begin(), it));
    for (int j = 0; j < dim; ++j) {
      y(i, j) = static_cast<double>((bits >> j) & 1u);
    }
  }
  return y;
}

// General-dimension generator: each row is an independent single-site Gibbs
// chain started from fair coin flips and burned in long enough that rows are
// effectively exact draws.
inline MatrixXd sample_ising_gibbs(const IsingMatrix& s, int n_rows,
                                   int burn_in_sweeps, RngStream rng) {
  if (burn_in_sweeps < 1) {
    throw ValidationError("Gibbs generator needs at least one sweep");
  }
  const int dim = s.dim();
  MatrixXd y(n_rows, dim);
  VectorXd row(dim);
  for (int i = 0; i < n_rows; ++i) {
    RngStream row_rng = rng.sub(static_cast<std::uint64_t>(i));
    for (int j = 0; j < dim; ++j) {
      row[j] = row_rng.uniform() <= 0.5 ? 1.0 : 0.0;
    }
    for (int sweep = 0; sweep < burn_in_sweeps; ++sweep) {
      for (int j = 0; j < dim; ++j) {
        double logit = 0.5 * s(j, j);
        for (int k = 0; k < dim; ++k) {
          if (k != j) logit += s(j, k) * row[k];
        }
        row[j] = row_rng.uniform() <= sigmoid(logit) ? 1.0 : 0.0;
      }
    }
    y.row(i) = row;
  }
  return y;
}

enum class MissingKind { kMcar, kMarAnchor, kScreening };

// The three masking mechanisms used by the simulation studies.
//   MCAR:       every cell independently missing with mcar_rate.
//   MAR_ANCHOR: cell (i, j) missing with probability anchor_table(y_anchor,
//               position of j among non-anchor columns); the anchor column
//               is always observed.
//   SCREENING:  when every screen column of a row is 0, all target columns
//               of that row are missing; nothing else is ever masked.
struct MissingnessSpec {
  MissingKind kind = MissingKind::kMcar;
  double mcar_rate = 0.0;
  int anchor_col = -1;
  MatrixXd anchor_table;  // 2 x (J-1), row y_anchor = 0 / 1
  std::vector<int> screen_cols;
  std::vector<int> target_cols;

  void validate(int dim) const {
    const auto in_range = [dim](int c) { return c >= 0 && c < dim; };
    switch (kind) {
      case MissingKind::kMcar:
        if (!(mcar_rate >= 0.0 && mcar_rate <= 1.0)) {
          throw ValidationError("mcar_rate must lie in [0, 1]");
        }
        break;
      case MissingKind::kMarAnchor: {
        if (!in_range(anchor_col)) {
          throw ValidationError("anchor column out of range");
        }
        if (anchor_table.rows() != 2 || anchor_table.cols() != dim - 1) {
          throw ValidationError("anchor table must be 2 x (J-1)");
        }
        if ((anchor_table.array() < 0.0).any() ||
            (anchor_table.array() > 1.0).any()) {
          throw ValidationError("anchor table entries must lie in [0, 1]");
        }
        break;
      }
      case MissingKind::kScreening: {
        if (screen_cols.empty() || target_cols.empty()) {
          throw ValidationError("screening needs screen and target columns");
        }
        for (int c : screen_cols) {
          if (!in_range(c)) throw ValidationError("screen column out of range");
        }
        for (int c : target_cols) {
          if (!in_range(c)) throw ValidationError("target column out of range");
          if (std::find(screen_cols.begin(), screen_cols.end(), c) !=
              screen_cols.end()) {
            throw ValidationError("screen columns cannot be masked");
          }
        }
        break;
      }
    }
  }
};

// Applies the masking mechanism to a complete matrix. Observed values are
// never altered, only hidden. Under MCAR a mask that would blank an entire
// row is redrawn (probability 2^-J per row), keeping the dataset invariant
// that every row has at least one observed cell.
inline ObservedDataset apply_missingness(const MatrixXd& y,
                                         const MissingnessSpec& spec,
                                         RngStream rng) {
  const int dim = static_cast<int>(y.cols());
  spec.validate(dim);
  CellMatrix cells(y.rows(), dim);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (int j = 0; j < dim; ++j) {
      cells(i, j) = static_cast<std::int8_t>(y(i, j));
    }
  }
  switch (spec.kind) {
    case MissingKind::kMcar: {
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        RngStream row_rng = rng.sub(static_cast<std::uint64_t>(i));
        for (;;) {
          std::vector<bool> mask(static_cast<std::size_t>(dim));
          int hidden = 0;
          for (int j = 0; j < dim; ++j) {
            mask[static_cast<std::size_t>(j)] =
                row_rng.uniform() <= spec.mcar_rate;
            hidden += mask[static_cast<std::size_t>(j)];
          }
          if (hidden == dim) continue;
          for (int j = 0; j < dim; ++j) {
            if (mask[static_cast<std::size_t>(j)]) cells(i, j) = -1;
          }
          break;
        }
      }
      break;
    }
    case MissingKind::kMarAnchor: {
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        RngStream row_rng = rng.sub(static_cast<std::uint64_t>(i));
        const int anchor = static_cast<int>(y(i, spec.anchor_col));
        for (int j = 0; j < dim; ++j) {
          if (j == spec.anchor_col) continue;
          const int pos = j < spec.anchor_col ? j : j - 1;
          if (row_rng.uniform() <= spec.anchor_table(anchor, pos)) {
            cells(i, j) = -1;
          }
        }
      }
      break;
    }
    case MissingKind::kScreening: {
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        bool all_negative = true;
        for (int c : spec.screen_cols) {
          if (y(i, c) != 0.0) {
            all_negative = false;
            break;
          }
        }
        if (all_negative) {
          for (int c : spec.target_cols) cells(i, c) = -1;
        }
      }
      break;
    }
  }
  return ObservedDataset(std::move(cells));
}

enum class StudyId { kStudyI, kStudyII, kStudyIII };

inline StudyId parse_study_id(const std::string& text) {
  if (text == "I" || text == "1") return StudyId::kStudyI;
  if (text == "II" || text == "2") return StudyId::kStudyII;
  if (text == "III" || text == "3") return StudyId::kStudyIII;
  throw ValidationError("unknown study id '" + text + "' (expected I/II/III)");
}

inline std::string study_name(StudyId id) {
  switch (id) {
    case StudyId::kStudyI:
      return "I";
    case StudyId::kStudyII:
      return "II";
    default:
      return "III";
  }
}

// True parameter matrices of the three simulation studies. All intercepts
// are zero; entries are listed as (row, column, value) on the lower
// triangle, 1-based.
inline IsingMatrix load_true_parameters(StudyId id) {
  struct Entry {
    int i, j;
    double v;
  };
  switch (id) {
    case StudyId::kStudyI: {
      IsingMatrix s(6);
      for (const Entry& e : {Entry{2, 1, -0.737}, Entry{3, 2, -0.408},
                             Entry{4, 3, 0.619}, Entry{5, 1, 0.769},
                             Entry{6, 1, 0.791}, Entry{6, 5, 0.741}}) {
        s.set(e.i - 1, e.j - 1, e.v);
      }
      return s;
    }
    case StudyId::kStudyII: {
      IsingMatrix s(6);
      for (const Entry& e : {Entry{2, 1, 0.500}, Entry{3, 2, 0.514},
                             Entry{4, 3, 0.865}, Entry{5, 1, 1.115},
                             Entry{6, 1, 1.151}, Entry{6, 5, 1.068}}) {
        s.set(e.i - 1, e.j - 1, e.v);
      }
      return s;
    }
    case StudyId::kStudyIII: {
      IsingMatrix s(15);
      for (const Entry& e :
           {Entry{3, 2, -0.96},  Entry{4, 2, 1.00},   Entry{4, 3, 0.5},
            Entry{5, 1, 0.48},   Entry{6, 3, 0.95},   Entry{6, 5, 0.47},
            Entry{7, 4, 0.55},   Entry{7, 5, -0.92},  Entry{8, 6, 0.98},
            Entry{8, 7, 0.74},   Entry{9, 1, -0.41},  Entry{9, 3, -0.54},
            Entry{10, 3, -0.47}, Entry{10, 7, -0.83}, Entry{10, 9, -0.41},
            Entry{11, 3, -0.74}, Entry{11, 4, 0.52},  Entry{11, 5, -0.55},
            Entry{11, 6, 0.85},  Entry{11, 8, 0.75},  Entry{11, 9, -0.98},
            Entry{12, 1, -0.54}, Entry{12, 3, 0.77},  Entry{12, 6, 0.41},
            Entry{12, 10, -0.74}, Entry{13, 6, -0.8}, Entry{13, 7, 0.56},
            Entry{13, 10, -0.78}, Entry{14, 7, 0.95}, Entry{14, 13, -0.96},
            Entry{15, 5, -0.97}, Entry{15, 8, 0.78}}) {
        s.set(e.i - 1, e.j - 1, e.v);
      }
      return s;
    }
  }
  throw ValidationError("unknown study id");
}

// Masking mechanisms paired with the study parameter sets: an anchor-driven
// MAR design, two screening items, and uniform 50% MCAR.
inline MissingnessSpec study_missingness(StudyId id) {
  MissingnessSpec spec;
  switch (id) {
    case StudyId::kStudyI: {
      spec.kind = MissingKind::kMarAnchor;
      spec.anchor_col = 5;
      spec.anchor_table.resize(2, 5);
      spec.anchor_table << 0.0, 0.1, 0.1, 0.0, 0.3,  // y_anchor = 0
          0.2, 0.0, 0.1, 0.1, 0.2;                   // y_anchor = 1
      break;
    }
    case StudyId::kStudyII: {
      spec.kind = MissingKind::kScreening;
      spec.screen_cols = {0, 1};
      spec.target_cols = {2, 3, 4, 5};
      break;
    }
    case StudyId::kStudyIII: {
      spec.kind = MissingKind::kMcar;
      spec.mcar_rate = 0.5;
      break;
    }
  }
  return spec;
}

}  // namespace isingimpute
