#pragma once

#include <cmath>
#include <cstdlib>

#include "isingimpute/rng.hpp"

namespace isingimpute {

// E[PG(1, c)] = tanh(c/2) / (2c), continued through c = 0 where the limit is
// 1/4. Evaluated by series near zero to avoid 0/0.
inline double pg_mean(double c) {
  const double a = std::abs(c);
  if (a < 1e-4) {
    const double c2 = c * c;
    return 0.25 - c2 / 48.0 + c2 * c2 / 480.0;
  }
  return std::tanh(0.5 * c) / (2.0 * c);
}

namespace detail {

constexpr double kPi = 3.141592653589793238462643383279502884;
// Crossover point of the two piecewise-Gaussian coefficient kernels.
constexpr double kPgTrunc = 0.64;

inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Coefficient a_n(x) of the alternating series for the Jacobi J*(1) density.
inline double pg_series_coef(int n, double x) {
  const double k = (n + 0.5) * kPi;
  if (x > kPgTrunc) {
    return k * std::exp(-0.5 * k * k * x);
  }
  const double expnt = -1.5 * (std::log(0.5 * kPi) + std::log(x)) +
                       std::log(k) - 2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(expnt);
}

// Probability that the proposal draws from the truncated-exponential branch
// (right tail) rather than the truncated inverse-Gaussian branch. An
// overflowing tail ratio correctly collapses to 0 under IEEE arithmetic.
inline double pg_right_tail_mass(double z) {
  const double t = kPgTrunc;
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double b = std::sqrt(1.0 / t) * (t * z - 1.0);
  const double a = -std::sqrt(1.0 / t) * (t * z + 1.0);
  const double x0 = std::log(fz) + fz * t;
  const double xb = x0 - z + std::log(norm_cdf(b));
  const double xa = x0 + z + std::log(norm_cdf(a));
  const double qdivp = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + qdivp);
}

// Inverse-Gaussian IG(1/z, 1) truncated to (0, kPgTrunc].
inline double pg_trunc_inv_gauss(double z, RngStream& rng) {
  const double t = kPgTrunc;
  double x = t + 1.0;
  if (1.0 / t > z) {
    // Mean exceeds the truncation point: sample 1/chi-square style proposals
    // and thin by the exp(-z^2 x / 2) tilt.
    double alpha = 0.0;
    while (rng.uniform() > alpha) {
      double e1, e2;
      do {
        e1 = rng.exponential();
        e2 = rng.exponential();
      } while (e1 * e1 > 2.0 * e2 / t);
      x = t / ((1.0 + t * e1) * (1.0 + t * e1));
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    const double mu = 1.0 / z;
    while (x > t) {
      double y = rng.normal();
      y *= y;
      const double half_mu = 0.5 * mu;
      const double mu_y = mu * y;
      x = mu + half_mu * mu_y -
          half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (rng.uniform() > mu / (mu + x)) {
        x = mu * mu / x;
      }
    }
  }
  return x;
}

}  // namespace detail

// One exact draw from the Polya-Gamma distribution PG(1, c) by the
// alternating-series accept/reject scheme on the tilted Jacobi density
// (proposal = truncated inverse-Gaussian body + exponential tail, series
// partial sums decide acceptance). Depends on c only through c^2.
inline double sample_pg1(double c, RngStream& rng) {
  const double z = 0.5 * std::abs(c);
  const double fz = 0.125 * detail::kPi * detail::kPi + 0.5 * z * z;
  const double right_mass = detail::pg_right_tail_mass(z);
  for (;;) {
    double x;
    if (rng.uniform() < right_mass) {
      x = detail::kPgTrunc + rng.exponential() / fz;
    } else {
      x = detail::pg_trunc_inv_gauss(z, rng);
    }
    double partial = detail::pg_series_coef(0, x);
    const double y = rng.uniform() * partial;
    for (int n = 1;; ++n) {
      if (n & 1) {
        partial -= detail::pg_series_coef(n, x);
        if (y <= partial) return 0.25 * x;
      } else {
        partial += detail::pg_series_coef(n, x);
        if (y > partial) break;
      }
    }
  }
}

}  // namespace isingimpute
