// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace trunclev {

// Deterministic random streams. std::mt19937_64 is fully specified by the
// standard; uniform doubles are derived by hand because the standard
// distributions are not bit-reproducible across library implementations.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Substream for a named stage, independent of call order elsewhere.
  static Rng stream(std::uint64_t master_seed, std::string_view stage) {
    std::uint64_t s = master_seed ^ fnv1a(stage);
    // Scramble so that nearby master seeds give unrelated streams.
    return Rng(splitmix64(s));
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Modulo bias is irrelevant at our n << 2^64 scales.
    return next_u64() % n;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace trunclev
