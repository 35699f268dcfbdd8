#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace rttforge {

using BigInt = mpz_class;

// Exact rational number, always stored in lowest terms with a positive
// denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long long value);  // NOLINT(google-explicit-constructor)
  Rational(long long numerator, long long denominator);
  Rational(const BigInt& numerator, const BigInt& denominator);

  // Accepts "p/q", "p", or a plain decimal such as "-12.375".
  static Rational parse(std::string_view text);

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }

  bool is_zero() const { return sgn(value_) == 0; }
  int sign() const { return sgn(value_); }
  bool is_integer() const { return value_.get_den() == 1; }

  // Canonical "p/q" form; integers keep the "/1" suffix.
  std::string to_string() const;
  // Rounded decimal with the given number of significant digits. Display
  // only; never parsed back.
  std::string to_decimal(int significant_digits = 12) const;
  double to_double() const { return value_.get_d(); }

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return cmp(a.value_, b.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& q) {
    return os << q.to_string();
  }

 private:
  explicit Rational(mpq_class v);
  mpq_class value_{0};
};

Rational abs(const Rational& q);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

// base^exp by repeated squaring; 0^0 = 1.
Rational qpow(const Rational& base, std::uint64_t exp);

// A natural number or a single infinity (every finite value is below it).
class ExtNat {
 public:
  constexpr ExtNat() = default;
  static constexpr ExtNat finite(std::uint64_t n) { return ExtNat(n); }
  static constexpr ExtNat infinity() {
    ExtNat e;
    e.value_.reset();
    return e;
  }
  // Decimal integer or "inf".
  static ExtNat parse(std::string_view text);

  constexpr bool is_infinite() const { return !value_.has_value(); }
  constexpr bool is_finite() const { return value_.has_value(); }
  // Requires is_finite().
  std::uint64_t value() const;

  std::string to_string() const;

  friend constexpr bool operator==(const ExtNat&, const ExtNat&) = default;
  friend constexpr std::strong_ordering operator<=>(const ExtNat& a,
                                                    const ExtNat& b) {
    if (a.is_infinite() || b.is_infinite()) {
      return a.is_infinite() == b.is_infinite()
                 ? std::strong_ordering::equal
                 : (a.is_infinite() ? std::strong_ordering::greater
                                    : std::strong_ordering::less);
    }
    return *a.value_ <=> *b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtNat& e) {
    return os << e.to_string();
  }

 private:
  constexpr explicit ExtNat(std::uint64_t n) : value_(n) {}
  std::optional<std::uint64_t> value_{0};
};

ExtNat ext_add(const ExtNat& a, const ExtNat& b);
// Throws std::domain_error on Finite(0).
ExtNat ext_pred(const ExtNat& a);

}  // namespace rttforge
