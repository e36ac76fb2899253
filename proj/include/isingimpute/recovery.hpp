#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>

#include "isingimpute/model.hpp"

namespace isingimpute {

// The distribution observable under two screening items: exact pattern
// probabilities for every y with y_1 = 1 or y_2 = 1, plus the aggregate
// probability of {Y_1 = 0, Y_2 = 0}. Patterns are encoded as bit masks with
// item j on bit j-1 (item 1 = lowest bit).
struct RestrictedDistribution {
  int dim = 0;
  std::map<std::uint32_t, double> probs_a;
  double prob_00 = 0.0;
};

inline RestrictedDistribution restricted_distribution(const IsingMatrix& s) {
  const int dim = s.dim();
  if (dim < 3) {
    throw ValidationError("restricted distribution requires J >= 3");
  }
  const double log_c = log_normalizing_constant(s);
  RestrictedDistribution out;
  out.dim = dim;
  for_each_pattern_energy(s, [&](std::uint32_t bits, double energy) {
    const double p = std::exp(energy - log_c);
    if ((bits & 3u) == 0u) {
      out.prob_00 += p;
    } else {
      out.probs_a.emplace(bits, p);
    }
  });
  return out;
}

namespace detail {

inline double restricted_log_ratio(const RestrictedDistribution& r,
                                   std::uint32_t bits, double log_base) {
  const auto it = r.probs_a.find(bits);
  if (it == r.probs_a.end()) {
    throw ValidationError("restricted distribution is missing pattern " +
                          std::to_string(bits));
  }
  return std::log(it->second) - log_base;
}

}  // namespace detail

// Reconstructs the full parameter matrix from a RestrictedDistribution.
//
// Log-ratios of the A-patterns against the baseline pattern (1, 0, ..., 0)
// give linear readouts that fix, in order: s_2i, s_ii, s_1i for i > 2, every
// s_ij with 2 < i < j, and two relations tying (s_11, s_12, s_22) together.
// The remaining scalar s_11 is the unique root of the strictly decreasing map
//   g(s_11) = exp(-s_11/2) * sum_{y: y_1=y_2=0} exp(y'Sy/2) - p00/p(baseline),
// located by bisection around the closed-form seed.
inline IsingMatrix recover_from_restricted(const RestrictedDistribution& r) {
  const int dim = r.dim;
  if (dim < 3) {
    throw ValidationError("recovery requires J >= 3");
  }
  if (static_cast<std::uint32_t>(r.probs_a.size()) !=
      3u * (std::uint32_t{1} << (dim - 2))) {
    throw ValidationError("restricted distribution has wrong pattern count");
  }
  const std::uint32_t e1 = 1u, e2 = 2u;
  const auto base_it = r.probs_a.find(e1);
  if (base_it == r.probs_a.end() || base_it->second <= 0.0) {
    throw ValidationError("baseline pattern (1,0,...,0) missing or zero");
  }
  const double log_base = std::log(base_it->second);
  const auto ratio = [&](std::uint32_t bits) {
    return detail::restricted_log_ratio(r, bits, log_base);
  };

  IsingMatrix s(dim);
  const double v = ratio(e2);        // (s_22 - s_11) / 2
  const double d = ratio(e1 | e2);   // s_22 / 2 + s_12
  for (int i = 2; i < dim; ++i) {
    const std::uint32_t ei = std::uint32_t{1} << i;
    const double u_i = ratio(e1 | ei);       // s_ii/2 + s_1i
    const double w_i = ratio(e2 | ei);       // s_22/2 + s_ii/2 + s_2i - s_11/2
    const double t_i = ratio(e1 | e2 | ei);  // s_22/2 + s_ii/2 + s_12+s_1i+s_2i
    const double s_2i = t_i - d - u_i;
    const double s_ii = 2.0 * (w_i - v - s_2i);
    s.set(i, i, s_ii);
    s.set(1, i, s_2i);
    s.set(0, i, u_i - 0.5 * s_ii);
  }
  for (int i = 2; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const std::uint32_t ei = std::uint32_t{1} << i;
      const std::uint32_t ej = std::uint32_t{1} << j;
      const double u_i = ratio(e1 | ei);
      const double u_j = ratio(e1 | ej);
      s.set(i, j, ratio(e1 | ei | ej) - u_i - u_j);
    }
  }

  // Residual scalar equation for s_11 from the (0,0) screening mass. The
  // tail sum only involves parameters recovered above.
  if (r.prob_00 <= 0.0) {
    throw ValidationError("prob_00 must be strictly positive");
  }
  const double log_r = std::log(r.prob_00) - log_base;
  double tail_max = 0.0;
  double tail_sum = 0.0;  // log-sum-exp over {y : y_1 = y_2 = 0}
  const std::uint64_t tail_count = std::uint64_t{1} << (dim - 2);
  for (std::uint64_t m = 0; m < tail_count; ++m) {
    double energy = 0.0;
    for (int i = 2; i < dim; ++i) {
      if (!((m >> (i - 2)) & 1u)) continue;
      energy += 0.5 * s(i, i);
      for (int j = i + 1; j < dim; ++j) {
        if ((m >> (j - 2)) & 1u) energy += s(i, j);
      }
    }
    if (energy <= tail_max) {
      tail_sum += std::exp(energy - tail_max);
    } else {
      tail_sum = tail_sum * std::exp(tail_max - energy) + 1.0;
      tail_max = energy;
    }
  }
  const double log_tail = tail_max + std::log(tail_sum);

  // g(s_11) = log_tail - s_11/2 - log_r is strictly decreasing with the
  // closed-form root as seed; bisection keeps the contract explicit about
  // inconsistent inputs (non-bracketing ratios).
  const auto g = [&](double s11) { return log_tail - 0.5 * s11 - log_r; };
  const double seed = 2.0 * (log_tail - log_r);
  double lo = seed - 50.0, hi = seed + 50.0;
  double width = 50.0;
  while (g(lo) < 0.0 || g(hi) > 0.0) {
    width *= 2.0;
    lo = seed - width;
    hi = seed + width;
    if (!std::isfinite(width) || width > 1e8) {
      throw ValidationError(
          "recovery bisection failed to bracket s_11: inconsistent input");
    }
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * (1.0 + std::abs(seed));
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double s11 = 0.5 * (lo + hi);
  s.set(0, 0, s11);
  s.set(1, 1, s11 + 2.0 * v);
  s.set(0, 1, d - 0.5 * s(1, 1));
  return s;
}

}  // namespace isingimpute
