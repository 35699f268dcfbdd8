#pragma once

#include <cstdint>
#include <random>

#include "rttforge/numerics.hpp"

namespace rttforge {

// Seeded generator with platform-independent draws. The standard
// distributions are implementation-defined, so bounded draws are done here by
// rejection sampling over the raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi);
  // True with probability p, for p in [0, 1] with a 64-bit denominator.
  bool chance(const Rational& p);
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rttforge
