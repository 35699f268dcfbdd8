#include "rttforge/numerics.hpp"

#include <cstdio>
#include <limits>
#include <stdexcept>

namespace rttforge {

namespace {

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

BigInt parse_int(std::string_view s) {
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
    digits.remove_prefix(1);
  }
  if (!is_digits(digits)) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  std::string text(s);
  if (text.front() == '+') text.erase(0, 1);
  return BigInt(text, 10);
}

}  // namespace

Rational::Rational(long long value) : value_(BigInt(std::to_string(value))) {}

Rational::Rational(long long numerator, long long denominator)
    : Rational(BigInt(std::to_string(numerator)),
               BigInt(std::to_string(denominator))) {}

Rational::Rational(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) throw std::domain_error("rational: zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational::Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)),
                    parse_int(text.substr(slash + 1)));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = false;
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) {
      negative = whole.front() == '-';
      whole.remove_prefix(1);
    }
    if ((!whole.empty() && !is_digits(whole)) ||
        (!frac.empty() && !is_digits(frac)) || (whole.empty() && frac.empty())) {
      throw std::invalid_argument("not a decimal: '" + std::string(text) + "'");
    }
    BigInt num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
    BigInt den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    if (negative) num = -num;
    return Rational(num, den);
  }
  return Rational(parse_int(text), BigInt(1));
}

std::string Rational::to_string() const {
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::string Rational::to_decimal(int significant_digits) const {
  // mpf keeps enough mantissa for large operands; precision in bits.
  mpf_class f(value_, 256);
  mp_exp_t exp = 0;
  std::string digits = f.get_str(exp, 10, significant_digits);
  if (digits.empty() || digits == "0") return "0";
  std::string out;
  if (digits.front() == '-') {
    out.push_back('-');
    digits.erase(0, 1);
  }
  if (exp <= 0) {
    out += "0.";
    out.append(static_cast<std::size_t>(-exp), '0');
    out += digits;
  } else if (static_cast<std::size_t>(exp) >= digits.size()) {
    out += digits;
    out.append(static_cast<std::size_t>(exp) - digits.size(), '0');
  } else {
    out += digits.substr(0, static_cast<std::size_t>(exp));
    out += ".";
    out += digits.substr(static_cast<std::size_t>(exp));
  }
  return out;
}

Rational& Rational::operator+=(const Rational& o) {
  value_ += o.value_;
  return *this;
}
Rational& Rational::operator-=(const Rational& o) {
  value_ -= o.value_;
  return *this;
}
Rational& Rational::operator*=(const Rational& o) {
  value_ *= o.value_;
  return *this;
}
Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational: division by zero");
  value_ /= o.value_;
  return *this;
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }

Rational abs(const Rational& q) { return q.sign() < 0 ? -q : q; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational qpow(const Rational& base, std::uint64_t exp) {
  BigInt num = base.numerator();
  BigInt den = base.denominator();
  if (exp > std::numeric_limits<unsigned long>::max()) {
    throw std::overflow_error("qpow: exponent too large");
  }
  BigInt pn, pd;
  mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(exp));
  mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(exp));
  // Powers of coprime integers stay coprime, so this is already reduced.
  return Rational(pn, pd);
}

ExtNat ExtNat::parse(std::string_view text) {
  if (text == "inf") return infinity();
  if (!is_digits(text)) {
    throw std::invalid_argument("not an extended natural: '" +
                                std::string(text) + "'");
  }
  return finite(std::stoull(std::string(text)));
}

std::uint64_t ExtNat::value() const {
  if (!value_) throw std::domain_error("ExtNat: infinity has no finite value");
  return *value_;
}

std::string ExtNat::to_string() const {
  return value_ ? std::to_string(*value_) : std::string("inf");
}

ExtNat ext_add(const ExtNat& a, const ExtNat& b) {
  if (a.is_infinite() || b.is_infinite()) return ExtNat::infinity();
  if (a.value() > std::numeric_limits<std::uint64_t>::max() - b.value()) {
    throw std::overflow_error("ext_add: overflow");
  }
  return ExtNat::finite(a.value() + b.value());
}

ExtNat ext_pred(const ExtNat& a) {
  if (a.is_infinite()) return a;
  if (a.value() == 0) throw std::domain_error("ext_pred: predecessor of zero");
  return ExtNat::finite(a.value() - 1);
}

}  // namespace rttforge
