#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <type_traits>

namespace kronmle {

using Rational = mpq_class;
using Integer = mpz_class;

template <typename T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return abs(x); }

template <typename T>
T from_double(double x);

template <>
inline double from_double<double>(double x) {
  return x;
}

// Exact binary value of x.
template <>
inline Rational from_double<Rational>(double x) {
  return Rational(x);
}

// Parses "p/q", integers, and decimal literals with optional exponent
// ("-1.25e-3"). Decimal literals are converted exactly.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& x);
// Shortest round-trip representation.
std::string to_string(double x);

}  // namespace kronmle
