#pragma once

// Exact rational arithmetic for closed-form latencies and capacities.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

#include "mscc/errors.hpp"

namespace mscc {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline std::int64_t to_int64(const Rational& r) {
  if (!is_integer(r)) throw Error(ErrorCode::contract, "expected an integer, got " + r.str());
  return numerator(r).convert_to<std::int64_t>();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational floor_of(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (numerator(r) < 0 && q * denominator(r) != numerator(r)) q -= 1;
  return Rational(q);
}

// "3/2", "-4", "1.25" or "0.5" are accepted.
inline Rational parse_rational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
    }
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      BigInt den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      return Rational(BigInt(digits), den);
    }
    return Rational(BigInt(text));
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse, "not a rational number: '" + text + "'");
  }
}

// Best rational approximation with denominator <= max_den (continued
// fractions). Doubles written in configs are usually short decimals.
inline Rational from_double(double x, std::int64_t max_den = 1000000) {
  if (!std::isfinite(x)) throw Error(ErrorCode::parse, "non-finite number");
  if (x == std::floor(x)) return Rational(static_cast<std::int64_t>(x));
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double v = x;
  for (int iter = 0; iter < 64; ++iter) {
    const auto a = static_cast<std::int64_t>(std::floor(v));
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const double frac = v - static_cast<double>(a);
    if (frac < 1e-12) break;
    v = 1.0 / frac;
  }
  return Rational(h1, k1);
}

inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace mscc
