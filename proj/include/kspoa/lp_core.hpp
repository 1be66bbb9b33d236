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

#ifndef KSPOA_LP_CORE_H_
#define KSPOA_LP_CORE_H_

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kspoa/numeric.hpp"

namespace kspoa {

enum class Sense { kMax, kMin };
enum class Relation { kLe, kEq, kGe };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

// Linear objective over nonnegative variables under linear constraints.
template <typename T>
struct LinearProgram {
  struct Constraint {
    std::vector<T> coeffs;
    Relation relation = Relation::kLe;
    T rhs{};
  };

  Sense sense = Sense::kMax;
  std::vector<T> objective;
  std::vector<Constraint> constraints;

  std::size_t variable_count() const { return objective.size(); }

  void add_constraint(std::vector<T> coeffs, Relation relation, T rhs) {
    if (coeffs.size() != variable_count()) {
      throw std::invalid_argument("constraint width must match variable count");
    }
    constraints.push_back({std::move(coeffs), relation, std::move(rhs)});
  }
};

template <typename T>
struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  T value{};
  std::vector<T> point;  // per variable
  // Lagrangian duals, one per constraint: for a max program, <= rows have
  // dual >= 0, >= rows dual <= 0, = rows free; signs flip for min.
  std::vector<T> dual;
  // Basic column indices of the final simplex tableau (solved instance),
  // recorded for reproducibility.
  std::vector<int> basis;
};

namespace lp_internal {

// Dense two-phase tableau simplex on the internal form
//   max c'x  s.t.  constraints as given, x >= 0,
// with Bland's anti-cycling pivot rule. Row count is expected to be
// moderate here; solve() dualizes wide-row instances before reaching this.
template <typename T>
class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram<T>& lp, const Compare<T>& cmp) : cmp_(cmp) {
    const std::size_t nvars = lp.variable_count();
    const std::size_t nrows = lp.constraints.size();
    internal_max_ = lp.sense == Sense::kMax;
    cost_.assign(nvars, T(0));
    for (std::size_t j = 0; j < nvars; ++j) {
      cost_[j] = internal_max_ ? lp.objective[j] : -lp.objective[j];
    }
    row_flip_.assign(nrows, false);

    // Count auxiliary columns first: slack for <=, surplus+artificial for
    // >=, artificial for =; relation taken after forcing rhs >= 0.
    std::vector<Relation> rel(nrows);
    for (std::size_t i = 0; i < nrows; ++i) {
      rel[i] = lp.constraints[i].relation;
      if (lp.constraints[i].rhs < T(0)) {
        row_flip_[i] = true;
        if (rel[i] == Relation::kLe) rel[i] = Relation::kGe;
        else if (rel[i] == Relation::kGe) rel[i] = Relation::kLe;
      }
    }
    std::size_t naux = 0;
    std::size_t nart = 0;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (rel[i] == Relation::kLe) ++naux;
      else if (rel[i] == Relation::kGe) { ++naux; ++nart; }
      else ++nart;
    }
    ncols_ = nvars + naux + nart;
    nstruct_ = nvars;
    art_begin_ = nvars + naux;
    cost_.resize(ncols_, T(0));

    tableau_.assign(nrows, std::vector<T>(ncols_ + 1, T(0)));
    basis_.assign(nrows, -1);
    identity_col_.assign(nrows, -1);

    std::size_t next_aux = nvars;
    std::size_t next_art = art_begin_;
    for (std::size_t i = 0; i < nrows; ++i) {
      const auto& con = lp.constraints[i];
      const T sign = row_flip_[i] ? T(-1) : T(1);
      for (std::size_t j = 0; j < nvars; ++j) tableau_[i][j] = sign * con.coeffs[j];
      tableau_[i][ncols_] = sign * con.rhs;
      if (rel[i] == Relation::kLe) {
        tableau_[i][next_aux] = T(1);
        basis_[i] = static_cast<int>(next_aux);
        identity_col_[i] = static_cast<int>(next_aux);
        ++next_aux;
      } else if (rel[i] == Relation::kGe) {
        tableau_[i][next_aux] = T(-1);
        ++next_aux;
        tableau_[i][next_art] = T(1);
        basis_[i] = static_cast<int>(next_art);
        identity_col_[i] = static_cast<int>(next_art);
        ++next_art;
      } else {
        tableau_[i][next_art] = T(1);
        basis_[i] = static_cast<int>(next_art);
        identity_col_[i] = static_cast<int>(next_art);
        ++next_art;
      }
    }
  }

  LpSolution<T> run() {
    LpSolution<T> sol;
    if (art_begin_ < ncols_) {
      if (!phase_one()) {
        sol.status = LpStatus::kInfeasible;
        return sol;
      }
    }
    if (!phase_two()) {
      sol.status = LpStatus::kUnbounded;
      return sol;
    }
    sol.status = LpStatus::kOptimal;
    sol.point.assign(nstruct_, T(0));
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < nstruct_) {
        sol.point[static_cast<std::size_t>(basis_[i])] = tableau_[i][ncols_];
      }
    }
    T value(0);
    for (std::size_t j = 0; j < nstruct_; ++j) value += cost_[j] * sol.point[j];
    sol.value = internal_max_ ? value : -value;
    sol.basis.assign(basis_.begin(), basis_.end());

    // y = c_B * B^{-1}, read through each row's identity column; then undo
    // row flips and the min->max objective negation.
    sol.dual.assign(tableau_.size(), T(0));
    for (std::size_t i = 0; i < tableau_.size(); ++i) {
      T y(0);
      for (std::size_t r = 0; r < tableau_.size(); ++r) {
        const int bc = basis_[r];
        if (bc >= 0 && !cmp_.is_zero(cost_[static_cast<std::size_t>(bc)])) {
          y += cost_[static_cast<std::size_t>(bc)] *
               tableau_[r][static_cast<std::size_t>(identity_col_[i])];
        }
      }
      if (row_flip_[i]) y = -y;
      if (!internal_max_) y = -y;
      sol.dual[i] = y;
    }
    return sol;
  }

 private:
  // Objective row z_j - c_j for the given cost vector, priced for the
  // current basis.
  std::vector<T> price(const std::vector<T>& costs) const {
    std::vector<T> obj(ncols_ + 1, T(0));
    for (std::size_t j = 0; j <= ncols_; ++j) {
      T z(0);
      for (std::size_t r = 0; r < tableau_.size(); ++r) {
        const std::size_t bc = static_cast<std::size_t>(basis_[r]);
        if (!cmp_.is_zero(costs[bc])) z += costs[bc] * tableau_[r][j];
      }
      obj[j] = z - (j < ncols_ ? costs[j] : T(0));
    }
    return obj;
  }

  void pivot(std::vector<T>& obj, std::size_t row, std::size_t col) {
    const T piv = tableau_[row][col];
    if constexpr (std::is_same_v<T, double>) {
      if (std::fabs(piv) < 1e-11) {
        throw ConditioningError("simplex pivot below tolerance");
      }
    }
    auto& prow = tableau_[row];
    for (std::size_t j = 0; j <= ncols_; ++j) prow[j] /= piv;
    for (std::size_t r = 0; r < tableau_.size(); ++r) {
      if (r == row || cmp_.is_zero(tableau_[r][col])) continue;
      const T factor = tableau_[r][col];
      for (std::size_t j = 0; j <= ncols_; ++j) tableau_[r][j] -= factor * prow[j];
      tableau_[r][col] = T(0);
    }
    if (!cmp_.is_zero(obj[col])) {
      const T factor = obj[col];
      for (std::size_t j = 0; j <= ncols_; ++j) obj[j] -= factor * prow[j];
      obj[col] = T(0);
    }
    basis_[row] = static_cast<int>(col);
  }

  // Bland's rule: entering = lowest-index improving column, leaving = min
  // ratio with ties broken by lowest basic column index. Returns false on
  // unboundedness.
  bool iterate(std::vector<T>& obj, bool allow_artificial) {
    for (;;) {
      std::size_t enter = ncols_;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (!allow_artificial && j >= art_begin_) break;
        if (cmp_.lt(obj[j], T(0))) { enter = j; break; }
      }
      if (enter == ncols_) return true;  // optimal
      std::size_t leave = tableau_.size();
      T best_ratio(0);
      for (std::size_t r = 0; r < tableau_.size(); ++r) {
        if (!cmp_.lt(T(0), tableau_[r][enter])) continue;
        const T ratio = tableau_[r][ncols_] / tableau_[r][enter];
        if (leave == tableau_.size() || cmp_.lt(ratio, best_ratio) ||
            (cmp_.eq(ratio, best_ratio) && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == tableau_.size()) return false;  // unbounded
      pivot(obj, leave, enter);
    }
  }

  bool phase_one() {
    std::vector<T> costs(ncols_, T(0));
    for (std::size_t j = art_begin_; j < ncols_; ++j) costs[j] = T(-1);
    std::vector<T> obj = price(costs);
    if (!iterate(obj, true)) {
      throw std::logic_error("phase one cannot be unbounded");
    }
    // Optimal phase-1 objective is -sum(artificials); nonzero means no
    // feasible point exists.
    if (cmp_.lt(obj[ncols_], T(0))) return false;
    // Drive remaining artificials out of the basis where the row allows;
    // rows that do not are redundant and keep a zero-valued artificial.
    for (std::size_t r = 0; r < tableau_.size(); ++r) {
      if (basis_[r] < 0 || static_cast<std::size_t>(basis_[r]) < art_begin_) continue;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (!cmp_.is_zero(tableau_[r][j])) {
          pivot(obj, r, j);
          break;
        }
      }
    }
    return true;
  }

  bool phase_two() {
    std::vector<T> obj = price(cost_);
    return iterate(obj, false);
  }

  Compare<T> cmp_;
  bool internal_max_ = true;
  std::size_t nstruct_ = 0;
  std::size_t art_begin_ = 0;
  std::size_t ncols_ = 0;
  std::vector<T> cost_;
  std::vector<std::vector<T>> tableau_;
  std::vector<int> basis_;
  std::vector<int> identity_col_;  // per row, a column that started as +e_i
  std::vector<bool> row_flip_;
};

}  // namespace lp_internal

template <typename T>
T lp_objective_value(const LinearProgram<T>& lp, const std::vector<T>& point) {
  T value(0);
  for (std::size_t j = 0; j < lp.variable_count(); ++j) value += lp.objective[j] * point[j];
  return value;
}

// Checks primal feasibility of the returned point, dual feasibility and
// signs of the returned multipliers, and strong duality b'y = value = c'x.
// Exact in rational mode. Throws std::logic_error on any violation.
template <typename T>
void verify_optimal(const LinearProgram<T>& lp, const LpSolution<T>& sol,
                    const Compare<T>& cmp = {}) {
  if (sol.status != LpStatus::kOptimal) throw std::logic_error("solution is not optimal");
  for (const T& x : sol.point) {
    if (cmp.lt(x, T(0))) throw std::logic_error("negative variable in LP solution");
  }
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& con = lp.constraints[i];
    T lhs(0);
    for (std::size_t j = 0; j < lp.variable_count(); ++j) lhs += con.coeffs[j] * sol.point[j];
    const bool ok = con.relation == Relation::kLe   ? cmp.le(lhs, con.rhs)
                    : con.relation == Relation::kGe ? cmp.le(con.rhs, lhs)
                                                    : cmp.eq(lhs, con.rhs);
    if (!ok) throw std::logic_error("LP point violates constraint " + std::to_string(i));
  }
  if (!cmp.eq(lp_objective_value(lp, sol.point), sol.value)) {
    throw std::logic_error("LP value does not match objective at point");
  }
  // Dual side.
  const bool is_max = lp.sense == Sense::kMax;
  T dual_value(0);
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& con = lp.constraints[i];
    const T& y = sol.dual[i];
    if (con.relation == Relation::kLe && cmp.lt(is_max ? y : -y, T(0))) {
      throw std::logic_error("dual sign violated on <= row " + std::to_string(i));
    }
    if (con.relation == Relation::kGe && cmp.lt(is_max ? -y : y, T(0))) {
      throw std::logic_error("dual sign violated on >= row " + std::to_string(i));
    }
    dual_value += y * con.rhs;
  }
  for (std::size_t j = 0; j < lp.variable_count(); ++j) {
    T aty(0);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
      aty += lp.constraints[i].coeffs[j] * sol.dual[i];
    }
    const bool ok = is_max ? cmp.le(lp.objective[j], aty) : cmp.le(aty, lp.objective[j]);
    if (!ok) throw std::logic_error("dual infeasible at variable " + std::to_string(j));
  }
  if (!cmp.eq(dual_value, sol.value)) {
    throw std::logic_error("strong duality gap in LP solution");
  }
}

namespace lp_internal {

// Normalized <=-only copy of a max program plus bookkeeping to map duals
// back to the original rows.
template <typename T>
struct NormalizedLe {
  LinearProgram<T> lp;                       // sense max, all rows <=
  std::vector<std::pair<int, T>> row_origin;  // (original row, sign)
};

template <typename T>
NormalizedLe<T> normalize_le(const LinearProgram<T>& lp) {
  NormalizedLe<T> out;
  out.lp.sense = Sense::kMax;
  out.lp.objective = lp.objective;
  if (lp.sense == Sense::kMin) {
    for (T& c : out.lp.objective) c = -c;
  }
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& con = lp.constraints[i];
    auto add = [&](const T& sign) {
      typename LinearProgram<T>::Constraint copy;
      copy.relation = Relation::kLe;
      copy.rhs = sign * con.rhs;
      copy.coeffs.reserve(con.coeffs.size());
      for (const T& a : con.coeffs) copy.coeffs.push_back(sign * a);
      out.lp.constraints.push_back(std::move(copy));
      out.row_origin.emplace_back(static_cast<int>(i), sign);
    };
    if (con.relation == Relation::kLe) add(T(1));
    else if (con.relation == Relation::kGe) add(T(-1));
    else { add(T(1)); add(T(-1)); }
  }
  return out;
}

}  // namespace lp_internal

// Proven-optimal solve. Two-phase primal simplex with Bland's rule; when a
// program has far more rows than variables the solver runs the same
// simplex on the dual and maps the certificate back, since a dense
// m-by-(m+n) tableau is not viable for those shapes. Every optimal result
// is re-verified with verify_optimal before being returned.
template <typename T>
LpSolution<T> solve(const LinearProgram<T>& lp, const Compare<T>& cmp = {}) {
  for (const auto& con : lp.constraints) {
    if (con.coeffs.size() != lp.variable_count()) {
      throw std::invalid_argument("constraint width must match variable count");
    }
  }

  const std::size_t nrows = lp.constraints.size();
  const std::size_t nvars = lp.variable_count();
  const bool wide = nrows > 8 * nvars + 64;

  LpSolution<T> sol;
  if (!wide) {
    sol = lp_internal::SimplexSolver<T>(lp, cmp).run();
  } else {
    auto normalized = lp_internal::normalize_le(lp);
    // Dual of max{c'x : Ax <= b, x >= 0} is min{b'y : A'y >= c, y >= 0};
    // its duals are an optimal primal point and vice versa.
    LinearProgram<T> dual_lp;
    dual_lp.sense = Sense::kMin;
    const std::size_t m = normalized.lp.constraints.size();
    dual_lp.objective.reserve(m);
    for (const auto& con : normalized.lp.constraints) dual_lp.objective.push_back(con.rhs);
    for (std::size_t j = 0; j < nvars; ++j) {
      typename LinearProgram<T>::Constraint row;
      row.relation = Relation::kGe;
      row.rhs = normalized.lp.objective[j];
      row.coeffs.reserve(m);
      for (const auto& con : normalized.lp.constraints) row.coeffs.push_back(con.coeffs[j]);
      dual_lp.constraints.push_back(std::move(row));
    }
    LpSolution<T> dual_sol = lp_internal::SimplexSolver<T>(dual_lp, cmp).run();
    if (dual_sol.status == LpStatus::kUnbounded) {
      sol.status = LpStatus::kInfeasible;
      return sol;
    }
    if (dual_sol.status == LpStatus::kInfeasible) {
      // Primal is unbounded or infeasible; the direct tableau settles it.
      sol = lp_internal::SimplexSolver<T>(lp, cmp).run();
      return sol;
    }
    sol.status = LpStatus::kOptimal;
    sol.point = dual_sol.dual;
    sol.value = lp.sense == Sense::kMax ? dual_sol.value : -dual_sol.value;
    sol.basis = dual_sol.basis;
    sol.dual.assign(nrows, T(0));
    for (std::size_t r = 0; r < m; ++r) {
      const auto& [orig, sign] = normalized.row_origin[r];
      T y = sign * dual_sol.point[r];
      if (lp.sense == Sense::kMin) y = -y;
      sol.dual[static_cast<std::size_t>(orig)] += y;
    }
  }
  if (sol.status == LpStatus::kOptimal) verify_optimal(lp, sol, cmp);
  return sol;
}

// Plain-text dump for external cross-checking: one objective line, then
// one constraint per line, exact coefficient rendering.
template <typename T>
void dump_lp(const LinearProgram<T>& lp, std::ostream& out) {
  auto fmt = [](const T& v) {
    if constexpr (std::is_same_v<T, Rational>) return format_rational(v);
    else return to_decimal(v);
  };
  out << (lp.sense == Sense::kMax ? "max:" : "min:");
  for (const T& c : lp.objective) out << ' ' << fmt(c);
  out << '\n';
  for (const auto& con : lp.constraints) {
    for (std::size_t j = 0; j < con.coeffs.size(); ++j) {
      if (j) out << ' ';
      out << fmt(con.coeffs[j]);
    }
    out << ' '
        << (con.relation == Relation::kLe ? "<=" : con.relation == Relation::kGe ? ">=" : "=")
        << ' ' << fmt(con.rhs) << '\n';
  }
}

}  // namespace kspoa

#endif  // KSPOA_LP_CORE_H_
