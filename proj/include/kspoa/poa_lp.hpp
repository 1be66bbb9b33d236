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

#ifndef KSPOA_POA_LP_H_
#define KSPOA_POA_LP_H_

#include <optional>
#include <string>
#include <vector>

#include "kspoa/label_calculus.hpp"
#include "kspoa/latency_basis.hpp"
#include "kspoa/lp_core.hpp"

namespace kspoa {

// A bound value that may be +infinity (unbounded price of anarchy).
template <typename T>
struct Extended {
  bool infinite = false;
  T value{};

  static Extended Infinite() { return {true, T{}}; }
  static Extended Finite(T v) { return {false, std::move(v)}; }
};

template <typename T>
std::string extended_to_string(const Extended<T>& e) {
  if (e.infinite) return "inf";
  if constexpr (std::is_same_v<T, Rational>) return format_rational(e.value);
  else return to_decimal(e.value);
}

// Smoothness certificate recovered from an optimal (rho, nu): lambda =
// 1/(binom(n,zeta) nu), mu = rho lambda - 1. The certificate is only
// usable when nu > 0 and mu >= 0; the 1/rho bound stands either way.
template <typename T>
struct LambdaMu {
  bool computed = false;  // false when nu = 0
  bool valid = false;     // computed and mu >= 0
  T lambda{};
  T mu{};
};

template <typename T>
struct PzetaResult {
  int zeta = 0;
  T rho{};
  T nu{};
  LambdaMu<T> certificate;
};

template <typename T>
struct QkResult {
  std::size_t c_index = 0;
  LpStatus status = LpStatus::kOptimal;
  T value{};            // Q*_k(n, c)
  ThetaVector<T> theta; // optimal theta, single basis slot
};

// Aggregated upper/lower bound pair for one (class, n, k).
template <typename T>
struct BoundReport {
  std::string class_name;
  int n = 0;
  int k = 0;
  bool exact_mode = true;
  Extended<T> upper;  // min over zeta of 1/P*_zeta
  Extended<T> lower;  // max over c of 1/Q*_k(n, c)
  int zeta_star = 0;          // argmin zeta (0 when upper is infinite)
  std::optional<std::size_t> c_star;  // argmax basis index
  std::vector<PzetaResult<T>> p_results;  // indexed by zeta - 1
  std::vector<QkResult<T>> q_results;     // indexed by basis element
};

// Upper-bound program over (rho, nu), rho >= nu >= 0, max rho:
// one row per (label, c) pair demanding
//   rho c(a+x) - nu [binom(n,zeta) c(a+x) - devsum] <= c(b+x).
template <typename T>
LinearProgram<T> build_P(int n, int zeta, const LatencyBasis& basis) {
  if (zeta < 1 || zeta > n) throw std::domain_error("zeta must be in 1..n");
  LinearProgram<T> lp;
  lp.sense = Sense::kMax;
  lp.objective = {T(1), T(0)};
  const LabelSet labels(n);
  const T groups = binomial_as<T>(n, zeta);
  // Functions that coincide on loads 0..n would only duplicate rows.
  const std::vector<std::size_t> distinct = basis.distinct_indices_on(n);
  for (const Label& label : labels.labels()) {
    for (std::size_t j : distinct) {
      const LocalCost c = basis.local_cost(j);
      const T c_ax = c.eval<T>(label.a + label.x);
      const T c_bx = c.eval<T>(label.b + label.x);
      const T bracket = groups * c_ax - deviation_sum<T>(n, zeta, label, c);
      lp.add_constraint({c_ax, -bracket}, Relation::kLe, c_bx);
    }
  }
  lp.add_constraint({T(1), T(-1)}, Relation::kGe, T(0));  // rho >= nu
  return lp;
}

// Lower-bound program over theta >= 0: min sum c(b+x) theta subject to
// sum c(a+x) theta = 1 and one equilibrium row per zeta in 1..k.
template <typename T>
LinearProgram<T> build_Q(int n, int k, const LocalCost& c) {
  if (k < 1 || k > n) throw std::domain_error("k must be in 1..n");
  LinearProgram<T> lp;
  lp.sense = Sense::kMin;
  const LabelSet labels(n);
  std::vector<T> c_ax(labels.size());
  lp.objective.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label& label = labels.at(i);
    c_ax[i] = c.eval<T>(label.a + label.x);
    lp.objective[i] = c.eval<T>(label.b + label.x);
  }
  lp.add_constraint(c_ax, Relation::kEq, T(1));
  for (int zeta = 1; zeta <= k; ++zeta) {
    const T groups = binomial_as<T>(n, zeta);
    std::vector<T> row(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      row[i] = groups * c_ax[i] - deviation_sum<T>(n, zeta, labels.at(i), c);
    }
    lp.add_constraint(std::move(row), Relation::kLe, T(0));
  }
  return lp;
}

// Inverse of the (rho, nu) substitution. lambda_zeta/(1+mu_zeta) = 1/rho
// holds whenever computed.
template <typename T>
LambdaMu<T> recover_lambda_mu(const T& rho, const T& nu, int n, int zeta,
                              const Compare<T>& cmp = {}) {
  LambdaMu<T> out;
  if (cmp.is_zero(nu)) return out;  // no finite lambda exists
  out.computed = true;
  out.lambda = T(1) / (binomial_as<T>(n, zeta) * nu);
  out.mu = rho * out.lambda - T(1);
  out.valid = !cmp.lt(out.mu, T(0));
  return out;
}

// Solves the k upper-bound programs and |L| lower-bound programs and
// assembles the bound pair.
template <typename T>
BoundReport<T> spoa_bounds(int n, int k, const LatencyBasis& basis,
                           const Compare<T>& cmp = {}) {
  if (k < 1 || k > n) throw std::domain_error("k must be in 1..n");
  BoundReport<T> report;
  report.class_name = basis.name();
  report.n = n;
  report.k = k;
  report.exact_mode = std::is_same_v<T, Rational>;

  bool have_finite_upper = false;
  bool have_zero_p = false;
  for (int zeta = 1; zeta <= k; ++zeta) {
    const LinearProgram<T> lp = build_P<T>(n, zeta, basis);
    const LpSolution<T> sol = solve(lp, cmp);
    if (sol.status != LpStatus::kOptimal) {
      throw std::runtime_error("upper-bound program unsolvable at zeta " +
                               std::to_string(zeta));
    }
    PzetaResult<T> pr;
    pr.zeta = zeta;
    pr.rho = sol.point[0];
    pr.nu = sol.point[1];
    pr.certificate = recover_lambda_mu(pr.rho, pr.nu, n, zeta, cmp);
    report.p_results.push_back(pr);
    if (cmp.is_zero(pr.rho)) {
      have_zero_p = true;
      continue;
    }
    const T bound = T(1) / pr.rho;
    if (!have_finite_upper || cmp.lt(bound, report.upper.value)) {
      report.upper = Extended<T>::Finite(bound);
      report.zeta_star = zeta;
      have_finite_upper = true;
    }
  }
  if (!have_finite_upper) {
    (void)have_zero_p;
    report.upper = Extended<T>::Infinite();
    report.zeta_star = 0;
  }

  bool have_lower = false;
  bool lower_infinite = false;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const LocalCost c = basis.local_cost(j);
    const LinearProgram<T> lp = build_Q<T>(n, k, c);
    const LpSolution<T> sol = solve(lp, cmp);
    QkResult<T> qr;
    qr.c_index = j;
    qr.status = sol.status;
    if (sol.status == LpStatus::kOptimal) {
      qr.value = sol.value;
      qr.theta = ThetaVector<T>(n, 1);
      for (std::size_t i = 0; i < sol.point.size(); ++i) {
        qr.theta.at(static_cast<int>(i)) = sol.point[i];
      }
      if (cmp.is_zero(sol.value)) {
        // Q* = 0: the price of anarchy in this class is unbounded.
        if (!lower_infinite) {
          lower_infinite = true;
          report.c_star = j;
        }
      } else if (!lower_infinite) {
        const T bound = T(1) / sol.value;
        if (!have_lower || cmp.lt(report.lower.value, bound)) {
          report.lower = Extended<T>::Finite(bound);
          report.c_star = j;
          have_lower = true;
        }
      }
    } else if (sol.status == LpStatus::kInfeasible) {
      // Only possible when c vanishes on every load 1..n; that basis
      // element contributes no lower bound.
    } else {
      throw std::runtime_error("lower-bound program unbounded for basis element " +
                               std::to_string(j));
    }
    report.q_results.push_back(std::move(qr));
  }
  if (lower_infinite) {
    report.lower = Extended<T>::Infinite();
  } else if (!have_lower) {
    report.lower = Extended<T>::Finite(T(1));  // trivial spoa >= 1
    report.c_star.reset();
  }
  return report;
}

}  // namespace kspoa

#endif  // KSPOA_POA_LP_H_
