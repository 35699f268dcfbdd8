#include "rttforge/rng.hpp"

#include <limits>
#include <stdexcept>

namespace rttforge {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

std::uint64_t Rng::between(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::between: hi < lo");
  if (lo == 0 && hi == std::numeric_limits<std::uint64_t>::max()) return next();
  return lo + below(hi - lo + 1);
}

bool Rng::chance(const Rational& p) {
  if (p.sign() <= 0) return false;
  if (p >= Rational(1)) return true;
  const BigInt den = p.denominator();
  if (!den.fits_ulong_p()) {
    throw std::invalid_argument("Rng::chance: denominator too large");
  }
  return below(den.get_ui()) < p.numerator().get_ui();
}

}  // namespace rttforge
