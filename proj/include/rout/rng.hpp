#pragma once

// Seeded pseudo-random generation shared by every sampler in the library.
//
// Engine: xoshiro256** (Blackman & Vigna), state expanded from a 64-bit seed
// with SplitMix64. Bounded integers use Lemire's multiply-shift rejection, so
// draws are bit-identical on every platform (std::uniform_int_distribution
// is implementation-defined and therefore not used).
//
// Independent streams are derived with derive_seed(master, k1, k2, ...):
//   h = splitmix64(master); for each key k: h = splitmix64(h ^ splitmix64(k + i * phi))
// where phi = 0x9E3779B97F4A7C15 and i is the key position (1-based).

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace rout {

/// A 64-bit seed. Identical seed and parameters give identical output.
struct Seed {
  std::uint64_t value = 0;
  constexpr Seed() = default;
  constexpr explicit Seed(std::uint64_t v) : value(v) {}
  friend constexpr bool operator==(Seed, Seed) = default;
};

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Mixes a master seed with a sequence of keys (trial index, n, r, ...).
constexpr Seed derive_seed(Seed master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master.value);
  std::uint64_t i = 1;
  for (std::uint64_t k : keys) {
    h = splitmix64(h ^ splitmix64(k + i * kGolden));
    ++i;
  }
  return Seed{h};
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(Seed seed) {
    std::uint64_t x = seed.value;
    for (auto& s : state_) {
      x += kGolden;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      s = z ^ (z >> 31);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool coin() { return ((*this)() >> 63) != 0; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

/// Poisson(mean) variate. Sequential inversion for mean <= 10, PTRS
/// transformed rejection (Hoermann 1993) above.
inline std::uint64_t sample_poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  if (mean <= 10.0) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p == 0.0 && cdf < u) break;  // cdf rounding floor; u sits in the far tail
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + kd * loglam - std::lgamma(kd + 1.0)) {
      return static_cast<std::uint64_t>(kd);
    }
  }
}

}  // namespace rout
