// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_RATIONAL_HPP_
#define SEQPIPE_RATIONAL_HPP_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqpipe {

namespace detail {

using Int128 = __int128;

inline Int128 abs128(Int128 v) { return v < 0 ? -v : v; }

inline Int128 gcd128(Int128 a, Int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    Int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::int64_t narrow128(Int128 v) {
  if (v > Int128(INT64_MAX) || v < Int128(INT64_MIN)) {
    throw std::overflow_error("rational arithmetic overflow (value exceeds 64-bit range)");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// Exact rational number on int64 numerator/denominator. All intermediate
/// products go through 128-bit arithmetic; narrowing back to 64 bits throws
/// std::overflow_error instead of silently wrapping. Always stored reduced
/// with a positive denominator, so equality is plain member comparison.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(runtime/explicit)
  constexpr Rational(int value) : num_(value), den_(1) {}           // NOLINT(runtime/explicit)

  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    assign(num, den);
  }

  static Rational from_parts(detail::Int128 num, detail::Int128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    detail::Int128 g = detail::gcd128(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
    Rational r;
    r.num_ = detail::narrow128(num);
    r.den_ = detail::narrow128(den);
    if (r.den_ == 0) throw std::domain_error("rational with zero denominator");
    return r;
  }

  /// Accepts "n", "n/d", and plain decimals like "1.5" or "-0.25".
  static Rational parse(std::string_view text);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// "p" when integral, otherwise "p/q".
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) {
      s += '/';
      s += std::to_string(den_);
    }
    return s;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    detail::Int128 n = detail::Int128(a.num_) * b.den_ + detail::Int128(b.num_) * a.den_;
    detail::Int128 d = detail::Int128(a.den_) * b.den_;
    return from_parts(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    detail::Int128 n = detail::Int128(a.num_) * b.den_ - detail::Int128(b.num_) * a.den_;
    detail::Int128 d = detail::Int128(a.den_) * b.den_;
    return from_parts(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_parts(detail::Int128(a.num_) * b.num_, detail::Int128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_parts(detail::Int128(a.num_) * b.den_, detail::Int128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    detail::Int128 lhs = detail::Int128(a.num_) * b.den_;
    detail::Int128 rhs = detail::Int128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  void assign(std::int64_t num, std::int64_t den) {
    *this = from_parts(num, den);
  }

  std::int64_t num_;
  std::int64_t den_;
};

inline Rational abs(const Rational& r) { return r.is_negative() ? -r : r; }

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("cannot parse rational from '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  bool negative = false;
  std::size_t pos = 0;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  auto read_digits = [&](detail::Int128& out) -> std::size_t {
    std::size_t count = 0;
    out = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      out = out * 10 + (text[pos] - '0');
      if (out > detail::Int128(INT64_MAX) * 1000000) throw std::overflow_error("rational literal too large");
      ++pos;
      ++count;
    }
    return count;
  };
  detail::Int128 integral = 0;
  if (read_digits(integral) == 0) return fail();
  if (pos == text.size()) {
    return from_parts(negative ? -integral : integral, 1);
  }
  if (text[pos] == '/') {
    ++pos;
    detail::Int128 den = 0;
    if (read_digits(den) == 0 || pos != text.size() || den == 0) return fail();
    return from_parts(negative ? -integral : integral, den);
  }
  if (text[pos] == '.') {
    ++pos;
    detail::Int128 frac = 0;
    std::size_t start = pos;
    if (read_digits(frac) == 0 || pos != text.size()) return fail();
    detail::Int128 scale = 1;
    for (std::size_t i = start; i < pos; ++i) scale *= 10;
    detail::Int128 num = integral * scale + frac;
    return from_parts(negative ? -num : num, scale);
  }
  return fail();
}

/// Fixed-point decimal rendering with round-half-away-from-zero, e.g.
/// format_decimal(2/3, 4) == "0.6667". Used for CSV output.
inline std::string format_decimal(const Rational& r, int digits) {
  if (digits < 0 || digits > 18) throw std::invalid_argument("format_decimal digits out of range");
  detail::Int128 scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  detail::Int128 num = detail::abs128(detail::Int128(r.numerator()));
  detail::Int128 den = r.denominator();
  detail::Int128 scaled = (num * scale * 2 + den) / (2 * den);  // round half away from zero
  detail::Int128 whole = scaled / scale;
  detail::Int128 frac = scaled % scale;
  std::string s;
  if (r.is_negative() && scaled != 0) s += '-';
  s += std::to_string(static_cast<long long>(detail::narrow128(whole)));
  if (digits > 0) {
    std::string f = std::to_string(static_cast<long long>(detail::narrow128(frac)));
    s += '.';
    s += std::string(static_cast<std::size_t>(digits) - f.size(), '0');
    s += f;
  }
  return s;
}

}  // namespace seqpipe

#endif  // SEQPIPE_RATIONAL_HPP_
