#pragma once

#include <cstdint>
#include <random>

#include "hebo/special_functions.hpp"

namespace hebo {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes a root seed with up to three stream identifiers so that
/// sub-generators (per restart, per iteration, per individual, ...)
/// are decorrelated and reproducible.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t s1, std::uint64_t s2 = 0,
                                 std::uint64_t s3 = 0) {
  std::uint64_t st = root;
  splitmix64(st);
  st ^= 0x9e3779b97f4a7c15ULL * (s1 + 1);
  splitmix64(st);
  st ^= 0xc2b2ae3d27d4eb4fULL * (s2 + 1);
  splitmix64(st);
  st ^= 0x165667b19e3779f9ULL * (s3 + 1);
  return splitmix64(st);
}

/// Deterministic random source. Draw routines are implemented on top of
/// the raw 64-bit stream (not std::*_distribution) so a given seed yields
/// the same sequence on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via inverse-CDF sampling.
  double normal() { return sf::normal_quantile(uniform_open()); }

  /// Uniform integer in [0, n), n >= 1. Unbiased (rejection sampling).
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hebo
