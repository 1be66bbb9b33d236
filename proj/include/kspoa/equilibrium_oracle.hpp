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

#ifndef KSPOA_EQUILIBRIUM_ORACLE_H_
#define KSPOA_EQUILIBRIUM_ORACLE_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "kspoa/congestion_game.hpp"
#include "kspoa/poa_lp.hpp"

namespace kspoa {

// Desk-scale verifier caps; exceeding one raises ResourceLimitError, never
// a silent truncation.
struct OracleLimits {
  std::uint64_t max_joint_strategies = 1'000'000;
  std::uint64_t max_deviation_checks = 100'000'000;
};

template <typename T>
struct DeviationWitness {
  std::vector<int> group;
  std::vector<int> replacement;  // strategy index per group member
  T deviated_cost{};
};

template <typename T>
struct KStrongCheck {
  bool is_equilibrium = false;
  T cost{};
  std::optional<DeviationWitness<T>> witness;
};

template <typename T>
struct EquilibriumReport {
  std::vector<JointStrategy> equilibria;
  T worst_cost{};
  T optimal_cost{};
  Extended<T> exact_spoa;
  // Set when optimal_cost = 0 and the ratio convention applies (1 when the
  // worst equilibrium also costs 0, infinite otherwise).
  bool spoa_by_convention = false;
};

template <typename T>
struct DynamicsStep {
  std::vector<int> group;
  std::vector<int> replacement;
  T cost_after{};
};

// Optional objective hook; the default (empty) objective is the system
// cost C, which also unlocks the incremental evaluator fast path.
template <typename T>
using ObjectiveFn = std::function<T(const CongestionGame<T>&, const JointStrategy&)>;

namespace oracle_internal {

// Groups of size 1..k in lexicographic order of their sorted member list:
// {0}, {0,1}, {0,1,2}, ..., {0,2}, ..., {1}, {1,2}, ... The visitor
// returns false to stop early.
inline bool for_each_group(int n, int k, const std::function<bool(const std::vector<int>&)>& fn) {
  std::vector<int> group;
  std::function<bool(int)> descend = [&](int first) -> bool {
    for (int i = first; i < n; ++i) {
      group.push_back(i);
      if (!fn(group)) return false;
      if (static_cast<int>(group.size()) < k) {
        if (!descend(i + 1)) return false;
      }
      group.pop_back();
    }
    return true;
  };
  return descend(0);
}

// All replacement tuples for a group, lexicographic by strategy index with
// the first member most significant.
template <typename T>
bool for_each_replacement(const CongestionGame<T>& game, const std::vector<int>& group,
                          const std::function<bool(const std::vector<int>&)>& fn) {
  std::vector<int> tuple(group.size(), 0);
  for (;;) {
    if (!fn(tuple)) return false;
    std::size_t pos = tuple.size();
    while (pos > 0) {
      --pos;
      if (++tuple[pos] < static_cast<int>(game.strategies(group[pos]).size())) break;
      tuple[pos] = 0;
      if (pos == 0) return true;
    }
  }
}

template <typename T>
JointStrategy joint_from_index(const CongestionGame<T>& game, std::uint64_t index) {
  JointStrategy s;
  s.choices.resize(static_cast<std::size_t>(game.player_count()));
  for (int i = game.player_count() - 1; i >= 0; --i) {
    const std::uint64_t size = game.strategies(i).size();
    s.choices[static_cast<std::size_t>(i)] = static_cast<int>(index % size);
    index /= size;
  }
  return s;
}

}  // namespace oracle_internal

// Definition check: C(s) <= C(s'_Gamma, s_{-Gamma}) for every group of
// size <= k and every replacement. A deviation that only ties does not
// disqualify the equilibrium. On failure the first violating pair in scan
// order is returned as witness.
template <typename T>
KStrongCheck<T> is_k_strong(const CongestionGame<T>& game, const JointStrategy& s, int k,
                            const Compare<T>& cmp = {}, const OracleLimits& limits = {},
                            const ObjectiveFn<T>& objective = {},
                            std::atomic<std::uint64_t>* deviation_counter = nullptr) {
  if (k < 1 || k > game.player_count()) throw std::domain_error("k must be in 1..n");
  game.check_joint(s);
  KStrongCheck<T> result;
  DeviationEvaluator<T> eval(game, s);
  result.cost = objective ? objective(game, s) : eval.base_cost();
  std::atomic<std::uint64_t> local_counter{0};
  std::atomic<std::uint64_t>& checks = deviation_counter ? *deviation_counter : local_counter;

  result.is_equilibrium = oracle_internal::for_each_group(
      game.player_count(), k, [&](const std::vector<int>& group) {
        return oracle_internal::for_each_replacement<T>(
            game, group, [&](const std::vector<int>& replacement) {
              if (checks.fetch_add(1, std::memory_order_relaxed) >= limits.max_deviation_checks) {
                throw ResourceLimitError("deviation check cap exceeded");
              }
              T deviated;
              if (objective) {
                deviated = objective(game, group_deviation(game, s, group, replacement));
              } else {
                deviated = eval.cost_after(group, replacement);
              }
              if (cmp.lt(deviated, result.cost)) {
                result.witness = DeviationWitness<T>{group, replacement, deviated};
                return false;
              }
              return true;
            });
      });
  return result;
}

// Exhaustive enumeration of all k-strong Nash equilibria plus the exact
// k-strong price of anarchy. Joint strategies are partitioned into
// contiguous index ranges across threads; merging preserves index order.
template <typename T>
EquilibriumReport<T> enumerate_k_strong(const CongestionGame<T>& game, int k,
                                        const Compare<T>& cmp = {}, const OracleLimits& limits = {},
                                        const ObjectiveFn<T>& objective = {}, int threads = 1) {
  if (k < 1 || k > game.player_count()) throw std::domain_error("k must be in 1..n");
  const std::uint64_t total = game.joint_strategy_count(limits.max_joint_strategies);
  if (total > limits.max_joint_strategies) {
    throw ResourceLimitError("joint strategy cap exceeded");
  }
  std::atomic<std::uint64_t> deviation_counter{0};

  struct Partial {
    std::vector<std::pair<std::uint64_t, JointStrategy>> equilibria;
    std::optional<T> worst;
    std::optional<T> optimal;
    std::exception_ptr error;
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  std::vector<Partial> partials(static_cast<std::size_t>(nthreads));

  auto work = [&](int t) {
    Partial& part = partials[static_cast<std::size_t>(t)];
    try {
      for (std::uint64_t idx = static_cast<std::uint64_t>(t); idx < total;
           idx += static_cast<std::uint64_t>(nthreads)) {
        const JointStrategy s = oracle_internal::joint_from_index(game, idx);
        const T cost = objective ? objective(game, s) : system_cost(game, s);
        if (!part.optimal || cmp.lt(cost, *part.optimal)) part.optimal = cost;
        const KStrongCheck<T> check =
            is_k_strong(game, s, k, cmp, limits, objective, &deviation_counter);
        if (check.is_equilibrium) {
          part.equilibria.emplace_back(idx, s);
          if (!part.worst || cmp.lt(*part.worst, cost)) part.worst = cost;
        }
      }
    } catch (...) {
      part.error = std::current_exception();
    }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    for (std::thread& th : pool) th.join();
  }

  EquilibriumReport<T> report;
  std::vector<std::pair<std::uint64_t, JointStrategy>> merged;
  std::optional<T> worst, optimal;
  for (Partial& part : partials) {
    if (part.error) std::rethrow_exception(part.error);
    merged.insert(merged.end(), part.equilibria.begin(), part.equilibria.end());
    if (part.worst && (!worst || cmp.lt(*worst, *part.worst))) worst = part.worst;
    if (part.optimal && (!optimal || cmp.lt(*part.optimal, *optimal))) optimal = part.optimal;
  }
  std::sort(merged.begin(), merged.end(),
            [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });
  for (auto& [idx, s] : merged) report.equilibria.push_back(std::move(s));
  report.worst_cost = worst.value_or(T(0));
  report.optimal_cost = optimal.value_or(T(0));
  if (!cmp.is_zero(report.optimal_cost)) {
    report.exact_spoa = Extended<T>::Finite(report.worst_cost / report.optimal_cost);
  } else if (cmp.is_zero(report.worst_cost)) {
    report.exact_spoa = Extended<T>::Finite(T(1));
    report.spoa_by_convention = true;
  } else {
    report.exact_spoa = Extended<T>::Infinite();
    report.spoa_by_convention = true;
  }
  return report;
}

// Deterministic group best-response dynamics: repeatedly applies the
// lexicographically first strictly improving deviation (group order as in
// for_each_group, then replacement tuple order) until none exists. The
// objective strictly decreases each step, so termination is guaranteed.
template <typename T>
JointStrategy group_best_response_dynamics(const CongestionGame<T>& game, int k,
                                           const JointStrategy& start,
                                           const Compare<T>& cmp = {},
                                           std::vector<DynamicsStep<T>>* step_log = nullptr,
                                           const ObjectiveFn<T>& objective = {}) {
  if (k < 1 || k > game.player_count()) throw std::domain_error("k must be in 1..n");
  game.check_joint(start);
  JointStrategy current = start;
  for (;;) {
    DeviationEvaluator<T> eval(game, current);
    const T current_cost = objective ? objective(game, current) : eval.base_cost();
    bool improved = false;
    oracle_internal::for_each_group(game.player_count(), k, [&](const std::vector<int>& group) {
      return oracle_internal::for_each_replacement<T>(
          game, group, [&](const std::vector<int>& replacement) {
            T deviated;
            if (objective) {
              deviated = objective(game, group_deviation(game, current, group, replacement));
            } else {
              deviated = eval.cost_after(group, replacement);
            }
            if (cmp.lt(deviated, current_cost)) {
              current = group_deviation(game, current, group, replacement);
              if (step_log) step_log->push_back({group, replacement, deviated});
              improved = true;
              return false;
            }
            return true;
          });
    });
    if (!improved) return current;
  }
}

// Sum of C(s'_Gamma, s_{-Gamma}) over all groups of size exactly zeta,
// with each member switching to its s' choice. This is the quantity the
// label calculus reproduces combinatorially.
template <typename T>
T sum_group_deviation_costs(const CongestionGame<T>& game, const JointStrategy& s,
                            const JointStrategy& s_prime, int zeta) {
  if (zeta < 1 || zeta > game.player_count()) throw std::domain_error("zeta must be in 1..n");
  game.check_joint(s_prime);
  DeviationEvaluator<T> eval(game, s);
  T total(0);
  std::vector<int> replacement;
  oracle_internal::for_each_group(game.player_count(), zeta, [&](const std::vector<int>& group) {
    if (static_cast<int>(group.size()) == zeta) {
      replacement.clear();
      for (int i : group) replacement.push_back(s_prime.choices[static_cast<std::size_t>(i)]);
      total += eval.cost_after(group, replacement);
    }
    return true;
  });
  return total;
}

// Direct check of the averaged deviation inequality for one (s, s') pair:
// (1/binom(n,zeta)) sum_{|Gamma|=zeta} C(s'_Gamma, s_{-Gamma})
//   <= lambda C(s') - mu C(s).
template <typename T>
bool verify_smoothness(const CongestionGame<T>& game, const T& lambda, const T& mu, int zeta,
                       const JointStrategy& s, const JointStrategy& s_prime,
                       const Compare<T>& cmp = {}) {
  if (cmp.lt(lambda, T(0)) || cmp.lt(mu, T(0))) {
    throw std::domain_error("lambda and mu must be nonnegative");
  }
  const T lhs = sum_group_deviation_costs(game, s, s_prime, zeta) /
                binomial_as<T>(game.player_count(), zeta);
  const T rhs = lambda * system_cost(game, s_prime) - mu * system_cost(game, s);
  return cmp.le(lhs, rhs);
}

}  // namespace kspoa

#endif  // KSPOA_EQUILIBRIUM_ORACLE_H_
