#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace msd {

/// Seeded random source for schedule generation and trial phases.
///
/// The engine is mt19937_64 and every variate is derived from raw 64-bit
/// draws with explicit arithmetic, so a given seed reproduces the same
/// stream bit-for-bit on any platform (std::uniform_*_distribution does
/// not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer on [lo, hi], inclusive. Rejection sampling, no modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (range == 0) return static_cast<std::int64_t>(gen_());  // full 64-bit span
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return lo + static_cast<std::int64_t>(x % range);
  }

  /// Exponential with the given rate, via inverse CDF.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// splitmix64 finalizer; used to derive independent per-cell seeds.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return mix(a + 0x632be59bd9b4e019ull * b); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace msd
