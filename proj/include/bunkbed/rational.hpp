#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bunkbed {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline int sign_of(const Rational& q) { return q.sign(); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Canonical fraction rendering: "a/b" fully reduced, "a" when b == 1.
inline std::string to_fraction_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rational rational_pow(const Rational& base, unsigned exp) {
  Rational result = 1;
  Rational acc = base;
  for (unsigned e = exp; e != 0; e >>= 1) {
    if (e & 1) result *= acc;
    acc *= acc;
  }
  return result;
}

/// Parses "a", "a/b", "0.25", "2.5e-3", "1e-9" (optionally signed) exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
  };
  size_t i = 0;
  auto more = [&] { return i < text.size(); };
  bool negative = false;
  if (more() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';

  std::string digits;
  while (more() && std::isdigit(static_cast<unsigned char>(text[i])))
    digits += text[i++];

  if (more() && text[i] == '/') {
    ++i;
    std::string den_digits;
    while (more() && std::isdigit(static_cast<unsigned char>(text[i])))
      den_digits += text[i++];
    if (digits.empty() || den_digits.empty() || more()) return fail();
    BigInt den(den_digits);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational q(BigInt(digits), den);
    return negative ? -q : q;
  }

  std::string frac_digits;
  if (more() && text[i] == '.') {
    ++i;
    while (more() && std::isdigit(static_cast<unsigned char>(text[i])))
      frac_digits += text[i++];
  }
  if (digits.empty() && frac_digits.empty()) return fail();

  long exponent = 0;
  if (more() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (more() && (text[i] == '+' || text[i] == '-')) exp_negative = text[i++] == '-';
    std::string exp_digits;
    while (more() && std::isdigit(static_cast<unsigned char>(text[i])))
      exp_digits += text[i++];
    if (exp_digits.empty() || exp_digits.size() > 6) return fail();
    exponent = std::stol(exp_digits);
    if (exp_negative) exponent = -exponent;
  }
  if (more()) return fail();

  BigInt mantissa(digits.empty() ? "0" : digits);
  for (char c : frac_digits) {
    mantissa *= 10;
    mantissa += c - '0';
  }
  exponent -= static_cast<long>(frac_digits.size());

  Rational q(mantissa);
  BigInt pow10 = 1;
  for (long k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) pow10 *= 10;
  if (exponent >= 0)
    q *= Rational(pow10);
  else
    q /= Rational(pow10);
  return negative ? -q : q;
}

}  // namespace bunkbed
