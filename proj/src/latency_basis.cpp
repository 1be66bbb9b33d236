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

#include "kspoa/latency_basis.hpp"

#include <sstream>

namespace kspoa {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(item);
  return parts;
}

}  // namespace

BasisFunction BasisFunction::Monomial(int degree) {
  if (degree < 1) throw std::invalid_argument("monomial degree must be >= 1");
  BasisFunction f;
  f.kind = Kind::kMonomial;
  f.degree = degree;
  return f;
}

BasisFunction BasisFunction::Exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
  BasisFunction f;
  f.kind = Kind::kExponential;
  f.rate = rate;
  return f;
}

BasisFunction BasisFunction::Table(std::vector<Rational> values) {
  if (values.empty()) throw std::invalid_argument("table basis needs at least one value");
  for (const Rational& v : values) {
    if (v < 0) throw std::invalid_argument("table basis values must be nonnegative");
  }
  BasisFunction f;
  f.kind = Kind::kTable;
  f.values = std::move(values);
  return f;
}

bool BasisFunction::operator==(const BasisFunction& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::kConstant: return true;
    case Kind::kMonomial: return degree == other.degree;
    case Kind::kExponential: return rate == other.rate;
    case Kind::kTable: return values == other.values;
  }
  return false;
}

std::string BasisFunction::spec_string(int max_load) const {
  if (max_load < 0) throw std::domain_error("max_load must be >= 0");
  if (kind == Kind::kExponential) {
    std::ostringstream out;
    out.precision(17);
    out << "exp:" << rate;
    return out.str();
  }
  std::string out = "table:[";
  for (int x = 0; x <= max_load; ++x) {
    if (x) out += ",";
    out += format_rational(eval<Rational>(x));
  }
  return out + "]";
}

std::string BasisFunction::describe() const {
  switch (kind) {
    case Kind::kConstant: return "1";
    case Kind::kMonomial: return degree == 1 ? "x" : "x^" + std::to_string(degree);
    case Kind::kExponential: {
      std::ostringstream out;
      out << "exp(" << rate << "x)";
      return out.str();
    }
    case Kind::kTable: {
      std::string out = "table[";
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_rational(values[i]);
      }
      return out + "]";
    }
  }
  return "?";
}

LatencyBasis::LatencyBasis(std::string name, std::vector<BasisFunction> functions)
    : name_(std::move(name)), functions_(std::move(functions)) {
  if (functions_.empty()) throw std::invalid_argument("basis must be nonempty");
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    for (std::size_t j = i + 1; j < functions_.size(); ++j) {
      if (functions_[i] == functions_[j]) {
        throw std::invalid_argument("duplicate basis function: " + functions_[i].describe());
      }
    }
    if (!functions_[i].exact()) exact_ = false;
  }
}

namespace {

bool same_on(const BasisFunction& f, const BasisFunction& g, int n, bool exact) {
  for (int x = 0; x <= n; ++x) {
    if (exact) {
      if (f.eval<Rational>(x) != g.eval<Rational>(x)) return false;
    } else {
      if (f.eval<double>(x) != g.eval<double>(x)) return false;
    }
  }
  return true;
}

}  // namespace

void LatencyBasis::check_distinct_on(int n) const {
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    for (std::size_t j = i + 1; j < functions_.size(); ++j) {
      if (same_on(functions_[i], functions_[j], n, exact_)) {
        throw std::invalid_argument("basis functions " + functions_[i].describe() + " and " +
                                    functions_[j].describe() + " coincide on 0.." +
                                    std::to_string(n));
      }
    }
  }
}

std::vector<std::size_t> LatencyBasis::distinct_indices_on(int n) const {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < functions_.size(); ++j) {
    bool duplicate = false;
    for (std::size_t i : keep) {
      if (same_on(functions_[i], functions_[j], n, exact_)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) keep.push_back(j);
  }
  return keep;
}

LatencyBasis parse_basis(const std::string& spec) {
  if (spec == "affine") {
    return LatencyBasis("affine", {BasisFunction::Constant(), BasisFunction::Monomial(1)});
  }
  if (spec.rfind("poly:", 0) == 0) {
    int d = 0;
    try {
      d = std::stoi(spec.substr(5));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad polynomial degree in basis spec: " + spec);
    }
    if (d < 1) throw std::invalid_argument("polynomial degree must be >= 1");
    std::vector<BasisFunction> fns{BasisFunction::Constant()};
    for (int i = 1; i <= d; ++i) fns.push_back(BasisFunction::Monomial(i));
    return LatencyBasis(spec, std::move(fns));
  }
  if (spec.rfind("exp:", 0) == 0) {
    std::vector<BasisFunction> fns;
    for (const std::string& part : split(spec.substr(4), ',')) {
      double rate = 0.0;
      try {
        rate = std::stod(part);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad exponential rate in basis spec: " + spec);
      }
      fns.push_back(BasisFunction::Exponential(rate));
    }
    if (fns.empty()) throw std::invalid_argument("exp basis needs at least one rate");
    return LatencyBasis(spec, std::move(fns));
  }
  if (spec.rfind("table:[", 0) == 0 && spec.back() == ']') {
    const std::string body = spec.substr(7, spec.size() - 8);
    std::vector<Rational> values;
    for (const std::string& part : split(body, ',')) values.push_back(parse_rational(part));
    return LatencyBasis(spec, {BasisFunction::Table(std::move(values))});
  }
  throw std::invalid_argument("unrecognized basis spec: " + spec);
}

}  // namespace kspoa
