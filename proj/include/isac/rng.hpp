#pragma once

#include "isac/pmf.hpp"

#include <cstdint>
#include <random>
#include <span>

namespace isac {

/// Portable seeded generator. Every draw is derived from the raw 64-bit
/// output of std::mt19937_64, whose sequence is fixed by the standard, so
/// identical (seed, stream) pairs reproduce bit-identical results on every
/// platform. Stream k of seed s is seeded with splitmix64(s + k * golden).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();
  double exponential() { return -std::log1p(-uniform()); }

  /// Index drawn from a cumulative distribution (last entry ~ 1).
  Index categorical(std::span<const double> cdf);

  /// Uniform draw from the probability simplex (flat Dirichlet).
  Pmf simplex(Index n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace isac
