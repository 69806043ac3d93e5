// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "coulab/common.hpp"

namespace coulab {

/// Seeded generator with platform-independent real conversions.
///
/// std::mt19937_64 is fully specified by the standard; the distribution
/// adaptors are not, so uniform and normal variates are derived here by hand
/// to keep every seeded run bit-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream derived from (seed, stream) via splitmix64.
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi);
  double normal();
  Vec3 unit_vector();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace coulab
