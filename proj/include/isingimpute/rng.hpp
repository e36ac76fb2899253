#pragma once

#include <cmath>
#include <cstdint>

namespace isingimpute {

namespace detail {

// Stateless finalizer from splitmix64.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  return mix64(state);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Counter-based splittable random stream (xoshiro256++ core, streams derived
// by splitmix64 hashing of a (seed, stream_id) pair).
//
// Two properties the samplers rely on:
//   * the same (seed, stream_id) always produces the same variate sequence;
//   * sub(id) derives a statistically independent child stream, so each
//     draw site in a sweep can own its stream regardless of evaluation order.
//
// All variate transforms are implemented from raw 64-bit outputs instead of
// <random> distributions, whose results differ between standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t h = detail::mix64(seed ^ 0x9E3779B97F4A7C15ULL);
    h ^= detail::mix64(stream_id + 0xD1B54A32D192ED03ULL);
    state_[0] = detail::splitmix64_next(h);
    state_[1] = detail::splitmix64_next(h);
    state_[2] = detail::splitmix64_next(h);
    state_[3] = detail::splitmix64_next(h);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Derives an independent child stream; children of distinct ids (or of
  // distinct parents) never share state with each other or with the parent.
  RngStream sub(std::uint64_t id) const {
    return RngStream(seed_, detail::mix64(stream_id_ ^ detail::mix64(
                                id + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never returns 0 so -log(u) is finite.
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential() { return -std::log(uniform()); }

  // Standard normal via the Marsaglia polar method; the spare value is
  // cached so pairs cost one transform.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  bool bernoulli(double p) { return uniform() <= p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection from the top to avoid modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Draw-site tags used to key substreams inside the fitting loop; ids only
// need to be distinct among children of the same parent stream. Keeping the
// S-step streams disjoint from the beta/imputation streams makes the
// retained S chain depend only on (seed, chain, t, data), which is what lets
// the complete-data code paths of the three estimators coincide exactly.
namespace stream_tag {
// children of a per-item stream
constexpr std::uint64_t kBetaOmega = 1;
constexpr std::uint64_t kBetaGauss = 2;
constexpr std::uint64_t kImpute = 3;
// children of a sampler-call stream
constexpr std::uint64_t kAlphaOmega = 1;
constexpr std::uint64_t kAlphaGauss = 2;
// children of a per-chain stream
constexpr std::uint64_t kChainBody = 0;
constexpr std::uint64_t kChainInitMissing = 1;
constexpr std::uint64_t kChainInitState = 2;
// child of a per-iteration stream, past any item index
constexpr std::uint64_t kAlphaStep = std::uint64_t{1} << 24;
}  // namespace stream_tag

}  // namespace isingimpute
