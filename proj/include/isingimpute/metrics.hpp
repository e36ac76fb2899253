#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "isingimpute/model.hpp"

namespace isingimpute {

// A truth matrix together with the estimates from K independent replications.
struct ReplicationSet {
  IsingMatrix truth;
  std::vector<IsingMatrix> estimates;

  void validate() const {
    if (estimates.empty()) {
      throw ValidationError("replication set needs at least one estimate");
    }
    for (const auto& e : estimates) {
      if (e.dim() != truth.dim()) {
        throw ValidationError("replication estimate dimension mismatch");
      }
    }
  }
};

struct MseBiasEntry {
  int i = 0;
  int j = 0;
  double truth = 0.0;
  double mse = 0.0;
  double bias = 0.0;
};

// Per-parameter mean squared error and bias over replications, for every
// lower-triangle position including intercepts.
inline std::vector<MseBiasEntry> mse_bias(const ReplicationSet& reps) {
  reps.validate();
  const int dim = reps.truth.dim();
  std::vector<MseBiasEntry> table;
  table.reserve(static_cast<std::size_t>(half_vec_length(dim)));
  const double k = static_cast<double>(reps.estimates.size());
  for (int j = 0; j < dim; ++j) {
    for (int i = j; i < dim; ++i) {
      MseBiasEntry entry{i, j, reps.truth(i, j), 0.0, 0.0};
      for (const auto& e : reps.estimates) {
        const double diff = e(i, j) - reps.truth(i, j);
        entry.mse += diff * diff;
        entry.bias += diff;
      }
      entry.mse /= k;
      entry.bias /= k;
      table.push_back(entry);
    }
  }
  return table;
}

struct RocPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

namespace detail {

// Indicator sums pooled over replications and j < l pairs, diagonal excluded.
inline RocPoint roc_point(const ReplicationSet& reps, double tau) {
  const int dim = reps.truth.dim();
  long tp = 0, fp = 0, positives = 0, negatives = 0;
  for (int j = 0; j < dim; ++j) {
    for (int l = j + 1; l < dim; ++l) {
      const bool edge = reps.truth(j, l) != 0.0;
      for (const auto& e : reps.estimates) {
        const bool selected = std::abs(e(j, l)) > tau;
        if (edge) {
          positives += 1;
          tp += selected;
        } else {
          negatives += 1;
          fp += selected;
        }
      }
    }
  }
  if (positives == 0 || negatives == 0) {
    throw ValidationError(
        "ROC needs at least one zero and one nonzero off-diagonal truth");
  }
  return RocPoint{tau, static_cast<double>(tp) / positives,
                  static_cast<double>(fp) / negatives};
}

}  // namespace detail

inline std::vector<RocPoint> roc_curve(const ReplicationSet& reps,
                                       const std::vector<double>& thresholds) {
  reps.validate();
  std::vector<RocPoint> curve;
  curve.reserve(thresholds.size());
  for (double tau : thresholds) {
    curve.push_back(detail::roc_point(reps, tau));
  }
  return curve;
}

// Exact threshold sweep: every distinct |estimate| breakpoint plus 0 and
// infinity, so the curve contains all attainable (TPR, FPR) pairs.
inline std::vector<double> roc_breakpoints(const ReplicationSet& reps) {
  reps.validate();
  const int dim = reps.truth.dim();
  std::vector<double> taus{0.0, std::numeric_limits<double>::infinity()};
  for (const auto& e : reps.estimates) {
    for (int j = 0; j < dim; ++j) {
      for (int l = j + 1; l < dim; ++l) {
        taus.push_back(std::abs(e(j, l)));
      }
    }
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  return taus;
}

// Trapezoidal area under the curve with endpoints (0,0) and (1,1) appended,
// integrated over FPR.
inline double auc(std::vector<RocPoint> curve) {
  curve.push_back(RocPoint{std::numeric_limits<double>::infinity(), 0.0, 0.0});
  curve.push_back(RocPoint{0.0, 1.0, 1.0});
  std::sort(curve.begin(), curve.end(), [](const RocPoint& a,
                                           const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += 0.5 * (curve[k].fpr - curve[k - 1].fpr) *
            (curve[k].tpr + curve[k - 1].tpr);
  }
  return area;
}

// Pooled intersection-over-union of the selected edge set {|estimate| > tau}
// against the true support, over replications and j < l pairs. An empty
// union counts as similarity 0.
inline double jaccard(const ReplicationSet& reps, double tau) {
  reps.validate();
  if (!(tau > 0.0)) throw ValidationError("Jaccard threshold must be > 0");
  const int dim = reps.truth.dim();
  long intersection = 0, unioned = 0;
  for (int j = 0; j < dim; ++j) {
    for (int l = j + 1; l < dim; ++l) {
      const bool edge = reps.truth(j, l) != 0.0;
      for (const auto& e : reps.estimates) {
        const bool selected = std::abs(e(j, l)) > tau;
        intersection += selected && edge;
        unioned += selected || edge;
      }
    }
  }
  return unioned == 0 ? 0.0
                      : static_cast<double>(intersection) / unioned;
}

}  // namespace isingimpute
