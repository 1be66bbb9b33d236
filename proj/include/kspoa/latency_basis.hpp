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

#ifndef KSPOA_LATENCY_BASIS_H_
#define KSPOA_LATENCY_BASIS_H_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kspoa/numeric.hpp"

namespace kspoa {

// One basis latency function ell(x), defined on integer loads x >= 0.
// Constant, monomial and rational-table kinds evaluate exactly; the
// exponential kind forces floating-point mode on everything built on top.
struct BasisFunction {
  enum class Kind { kConstant, kMonomial, kExponential, kTable };

  Kind kind = Kind::kConstant;
  int degree = 0;                 // monomial
  double rate = 0.0;              // exponential, > 0
  std::vector<Rational> values;   // table, index 0..n

  static BasisFunction Constant() { return {Kind::kConstant}; }
  static BasisFunction Monomial(int degree);
  static BasisFunction Exponential(double rate);
  static BasisFunction Table(std::vector<Rational> values);

  bool exact() const { return kind != Kind::kExponential; }
  bool operator==(const BasisFunction& other) const;

  // ell(x). Throws std::domain_error for x < 0 or x past the table end,
  // and std::logic_error when asked for an exact value of an exponential.
  template <typename T>
  T eval(int x) const;

  std::string describe() const;

  // Grammar form accepted by parse_basis. Exact kinds are rendered as a
  // table over loads 0..max_load so the result stands alone as a
  // single-element basis spec.
  std::string spec_string(int max_load) const;
};

// Local cost c(x) = x * ell(x) of a single basis function.
struct LocalCost {
  BasisFunction latency;

  template <typename T>
  T eval(int x) const {
    T ell = latency.eval<T>(x);
    if constexpr (std::is_same_v<T, Rational>) {
      return Rational(x) * ell;
    } else {
      return static_cast<T>(x) * ell;
    }
  }
};

// Ordered basis set L. Immutable after construction.
class LatencyBasis {
 public:
  // Rejects an empty list and structurally duplicate entries.
  LatencyBasis(std::string name, std::vector<BasisFunction> functions);

  const std::string& name() const { return name_; }
  const std::vector<BasisFunction>& functions() const { return functions_; }
  std::size_t size() const { return functions_.size(); }
  const BasisFunction& at(std::size_t j) const { return functions_.at(j); }
  LocalCost local_cost(std::size_t j) const { return LocalCost{functions_.at(j)}; }

  // True when every basis function supports exact rational evaluation.
  bool exact() const { return exact_; }

  // Rejects bases with two functions that coincide on every load 0..n.
  void check_distinct_on(int n) const;

  // Indices of the first representative of each pointwise-on-0..n
  // equivalence class; duplicates only add redundant LP rows.
  std::vector<std::size_t> distinct_indices_on(int n) const;

 private:
  std::string name_;
  std::vector<BasisFunction> functions_;
  bool exact_ = true;
};

// Basis specification grammar, used identically by the CLI, the JSON game
// format and the config surface:
//   "affine"            -> {1, x}
//   "poly:d"            -> {1, x, ..., x^d}
//   "exp:a1,a2,..."     -> {e^(a1 x), ...}         (floating point)
//   "table:[v0,v1,...]" -> single table function, rational entries
LatencyBasis parse_basis(const std::string& spec);

template <typename T>
T BasisFunction::eval(int x) const {
  if (x < 0) throw std::domain_error("latency argument below 0");
  switch (kind) {
    case Kind::kConstant:
      return T(1);
    case Kind::kMonomial: {
      T result(1);
      for (int i = 0; i < degree; ++i) result *= T(x);
      return result;
    }
    case Kind::kExponential:
      if constexpr (std::is_same_v<T, Rational>) {
        throw std::logic_error("exponential basis has no exact evaluation");
      } else {
        return std::exp(rate * static_cast<double>(x));
      }
    case Kind::kTable: {
      if (static_cast<std::size_t>(x) >= values.size()) {
        throw std::domain_error("latency argument past table end");
      }
      if constexpr (std::is_same_v<T, Rational>) {
        return values[static_cast<std::size_t>(x)];
      } else {
        return values[static_cast<std::size_t>(x)].convert_to<T>();
      }
    }
  }
  throw std::logic_error("unreachable basis kind");
}

}  // namespace kspoa

#endif  // KSPOA_LATENCY_BASIS_H_
