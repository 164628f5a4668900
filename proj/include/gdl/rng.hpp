#pragma once

// Pinned, self-contained PRNG so that identical seeds give identical streams
// everywhere, independent of the standard library implementation.
//
//   generator          xoshiro256** 1.0 (Blackman & Vigna, public domain)
//   state seeding      four successive outputs of SplitMix64 run on the seed
//   uniform double     (next_u64() >> 11) * 2^-53, i.e. [0, 1)
//   bounded integer    rejection sampling on the high bits (unbiased)
//   normal variate     Marsaglia polar method; the spare value is cached
//   substream k        a fresh generator seeded with
//                      splitmix_mix(seed + (k + 1) * 0x9E3779B97F4A7C15)
//
// The integer and uniform streams are bit-exact across platforms. Normal
// variates additionally go through std::log/std::sqrt; sqrt is IEEE-exact,
// log is correctly rounded on every libm we target but is not guaranteed so
// by the standard.

#include <array>
#include <cmath>
#include <cstdint>

#include "gdl/errors.hpp"

namespace gdl {

namespace detail {

inline std::uint64_t splitmix_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); unbiased via rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("Rng::below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal, Marsaglia polar method.
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
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  // Independent substream: documented key split on the original seed.
  Rng substream(std::uint64_t stream) const {
    return Rng(derive_seed(seed_, stream));
  }

  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return detail::splitmix_mix(base + (stream + 1) * 0x9E3779B97F4A7C15ULL);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gdl
