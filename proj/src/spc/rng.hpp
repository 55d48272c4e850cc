// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace spc {

/// SplitMix64: 64-bit-state PRNG (Vigna's reference constants).
/// Used for weight init and synthetic scenes; identical output on every
/// platform for a given seed, which is what the cross-process identity
/// checks rely on.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

 private:
  uint64_t state_;
};

/// One SplitMix64 scramble round; used to derive decorrelated sub-seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  return SplitMix64(seed + (salt + 1) * 0x9E3779B97F4A7C15ull).next_u64();
}

}  // namespace spc
