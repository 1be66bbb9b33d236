// Copyright 2026 The kspoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KSPOA_NUMERIC_H_
#define KSPOA_NUMERIC_H_

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace kspoa {

// Exact arithmetic scalar. All polynomial/table game classes evaluate in
// this type end-to-end; exponential classes fall back to double.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Comparison context shared by the game engine, the oracle and the simplex.
// For Rational the tolerance is ignored and comparisons are exact; for
// double a symmetric absolute tolerance applies.
template <typename T>
struct Compare {
  T tol{};

  bool eq(const T& a, const T& b) const { return a == b; }
  bool le(const T& a, const T& b) const { return a <= b; }
  bool lt(const T& a, const T& b) const { return a < b; }
  bool is_zero(const T& a) const { return a == 0; }
};

template <>
struct Compare<double> {
  double tol = 1e-9;

  bool eq(double a, double b) const { return std::fabs(a - b) <= tol; }
  bool le(double a, double b) const { return a <= b + tol; }
  bool lt(double a, double b) const { return a < b - tol; }
  bool is_zero(double a) const { return std::fabs(a) <= tol; }
};

// "p/q" (or plain integer) parsing used by the game JSON format and the
// CLI. Throws std::invalid_argument on malformed input or q == 0.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  try {
    Rational r(text);
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational literal: " + text);
  }
}

// Canonical rendering: lowest terms, "p" when the denominator is 1,
// otherwise "p/q" with q > 0. parse(format(r)) == r byte-exactly.
inline std::string format_rational(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Decimal rendering to 12 significant digits, for report output next to
// the exact form.
inline std::string to_decimal(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", r.convert_to<double>());
  return buf;
}

inline std::string to_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <typename T>
double to_double(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return v.template convert_to<double>();
  } else {
    return static_cast<double>(v);
  }
}

// Exact binomial coefficient with the zero convention binom(m, r) = 0 for
// r < 0 or r > m. Used by the label calculus, so the convention must be
// uniform everywhere.
inline BigInt binomial(long long m, long long r) {
  if (r < 0 || r > m || m < 0) return 0;
  if (r > m - r) r = m - r;
  BigInt result = 1;
  for (long long i = 1; i <= r; ++i) {
    result *= (m - r + i);
    result /= i;
  }
  return result;
}

template <typename T>
T binomial_as(long long m, long long r) {
  if constexpr (std::is_same_v<T, Rational>) {
    return Rational(binomial(m, r));
  } else {
    return binomial(m, r).convert_to<T>();
  }
}

// Raised when an enumeration would exceed its configured cap; callers must
// not silently truncate.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a floating-point simplex pivot falls below tolerance and the
// instance cannot be trusted.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kspoa

#endif  // KSPOA_NUMERIC_H_
