#pragma once

#include <cmath>
#include <cstdint>

namespace capdrum::detail {

// splitmix64; identical streams on every platform, cheap to seed per walk.
struct SplitMix64 {
  std::uint64_t s;

  explicit SplitMix64(std::uint64_t seed) : s(seed) {
    next();
    next();
  }

  std::uint64_t next() {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // in [0, 1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  // standard normal, Box-Muller
  void normal_pair(double& a, double& b) {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double m = std::sqrt(-2.0 * std::log(u1));
    a = m * std::cos(2.0 * M_PI * u2);
    b = m * std::sin(2.0 * M_PI * u2);
  }
};

// Full-avalanche finalizer (splitmix64 output function).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Per-stream seed.  Both inputs go through the avalanche: anything linear in
// index (for example index * gamma) keeps consecutive streams one splitmix
// increment apart, which makes walk i+1 replay walk i's draws shifted by one
// and destroys independence across walks.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + mix64(index + 0x9E3779B97F4A7C15ULL));
}

}  // namespace capdrum::detail
