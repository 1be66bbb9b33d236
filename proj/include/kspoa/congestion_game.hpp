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

#ifndef KSPOA_CONGESTION_GAME_H_
#define KSPOA_CONGESTION_GAME_H_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kspoa/latency_basis.hpp"
#include "kspoa/numeric.hpp"

namespace kspoa {

// A strategy is a set of resource ids, stored sorted and duplicate-free.
using Strategy = std::vector<int>;

template <typename T>
struct Resource {
  std::vector<T> alpha;  // one scaling coefficient per basis function, >= 0
};

struct JointStrategy {
  std::vector<int> choices;  // per player, an index into its strategy set

  bool operator==(const JointStrategy&) const = default;
};

// Atomic congestion game over a latency basis. Immutable after
// construction; per-resource local cost tables c_e(x) for x in 0..n are
// precomputed so that evaluations are table lookups.
template <typename T>
class CongestionGame {
 public:
  CongestionGame(int n, LatencyBasis basis, std::vector<Resource<T>> resources,
                 std::vector<std::vector<Strategy>> strategy_sets)
      : n_(n),
        basis_(std::move(basis)),
        resources_(std::move(resources)),
        strategy_sets_(std::move(strategy_sets)) {
    if (n_ < 1) throw std::invalid_argument("player count must be >= 1");
    if (static_cast<int>(strategy_sets_.size()) != n_) {
      throw std::invalid_argument("strategy sets must cover every player");
    }
    for (auto& per_player : strategy_sets_) {
      if (per_player.empty()) {
        throw std::invalid_argument("every player needs at least one strategy");
      }
      for (Strategy& strat : per_player) {
        std::sort(strat.begin(), strat.end());
        if (std::adjacent_find(strat.begin(), strat.end()) != strat.end()) {
          throw std::invalid_argument("strategy contains a duplicate resource");
        }
        for (int e : strat) {
          if (e < 0 || e >= static_cast<int>(resources_.size())) {
            throw std::invalid_argument("strategy references unknown resource " +
                                        std::to_string(e));
          }
        }
      }
    }
    for (const Resource<T>& r : resources_) {
      if (r.alpha.size() != basis_.size()) {
        throw std::invalid_argument("resource coefficient count must match basis size");
      }
      for (const T& a : r.alpha) {
        if (a < T(0)) throw std::invalid_argument("resource coefficients must be >= 0");
      }
    }
    build_cost_tables();
  }

  int player_count() const { return n_; }
  const LatencyBasis& basis() const { return basis_; }
  const std::vector<Resource<T>>& resources() const { return resources_; }
  int resource_count() const { return static_cast<int>(resources_.size()); }
  const std::vector<Strategy>& strategies(int player) const {
    return strategy_sets_.at(static_cast<std::size_t>(player));
  }
  const Strategy& strategy(int player, int index) const {
    return strategy_sets_.at(static_cast<std::size_t>(player)).at(static_cast<std::size_t>(index));
  }

  void check_joint(const JointStrategy& s) const {
    if (static_cast<int>(s.choices.size()) != n_) {
      throw std::invalid_argument("joint strategy must have one choice per player");
    }
    for (int i = 0; i < n_; ++i) {
      if (s.choices[i] < 0 ||
          s.choices[i] >= static_cast<int>(strategy_sets_[static_cast<std::size_t>(i)].size())) {
        throw std::invalid_argument("joint strategy choice out of range for player " +
                                    std::to_string(i));
      }
    }
  }

  // Total latency of resource e at load x, i.e. sum_j alpha_e^j * ell^j(x).
  T latency(int e, int x) const { return latency_table_.at(idx(e, x)); }

  // Local cost of resource e at load x, i.e. x * latency(e, x).
  T resource_cost(int e, int x) const { return cost_table_.at(idx(e, x)); }

  // Total number of joint strategies, saturating at cap+1.
  std::uint64_t joint_strategy_count(std::uint64_t cap) const {
    std::uint64_t total = 1;
    for (const auto& per_player : strategy_sets_) {
      total *= per_player.size();
      if (total > cap) return cap + 1;
    }
    return total;
  }

 private:
  std::size_t idx(int e, int x) const {
    if (e < 0 || e >= resource_count()) {
      throw std::domain_error("unknown resource id " + std::to_string(e));
    }
    if (x < 0 || x > n_) throw std::domain_error("load out of range 0..n");
    return static_cast<std::size_t>(e) * static_cast<std::size_t>(n_ + 1) +
           static_cast<std::size_t>(x);
  }

  void build_cost_tables() {
    latency_table_.reserve(resources_.size() * static_cast<std::size_t>(n_ + 1));
    cost_table_.reserve(resources_.size() * static_cast<std::size_t>(n_ + 1));
    std::vector<std::vector<T>> basis_latency(basis_.size());
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      for (int x = 0; x <= n_; ++x) basis_latency[j].push_back(basis_.at(j).eval<T>(x));
    }
    for (const Resource<T>& r : resources_) {
      for (int x = 0; x <= n_; ++x) {
        T ell(0);
        for (std::size_t j = 0; j < basis_.size(); ++j) ell += r.alpha[j] * basis_latency[j][x];
        latency_table_.push_back(ell);
        cost_table_.push_back(T(x) * ell);
      }
    }
  }

  int n_;
  LatencyBasis basis_;
  std::vector<Resource<T>> resources_;
  std::vector<std::vector<Strategy>> strategy_sets_;
  std::vector<T> latency_table_;
  std::vector<T> cost_table_;
};

// |s|_e for one resource.
template <typename T>
int load(const CongestionGame<T>& game, const JointStrategy& s, int e) {
  if (e < 0 || e >= game.resource_count()) {
    throw std::domain_error("unknown resource id " + std::to_string(e));
  }
  game.check_joint(s);
  int count = 0;
  for (int i = 0; i < game.player_count(); ++i) {
    const Strategy& strat = game.strategy(i, s.choices[static_cast<std::size_t>(i)]);
    if (std::binary_search(strat.begin(), strat.end(), e)) ++count;
  }
  return count;
}

// Full load vector, one entry per resource.
template <typename T>
std::vector<int> loads(const CongestionGame<T>& game, const JointStrategy& s) {
  game.check_joint(s);
  std::vector<int> result(static_cast<std::size_t>(game.resource_count()), 0);
  for (int i = 0; i < game.player_count(); ++i) {
    for (int e : game.strategy(i, s.choices[static_cast<std::size_t>(i)])) {
      ++result[static_cast<std::size_t>(e)];
    }
  }
  return result;
}

template <typename T>
T cost_of_loads(const CongestionGame<T>& game, const std::vector<int>& load_vector) {
  T total(0);
  for (int e = 0; e < game.resource_count(); ++e) {
    total += game.resource_cost(e, load_vector[static_cast<std::size_t>(e)]);
  }
  return total;
}

// System cost C(s) = sum_e |s|_e * ell_e(|s|_e).
template <typename T>
T system_cost(const CongestionGame<T>& game, const JointStrategy& s) {
  return cost_of_loads(game, loads(game, s));
}

// Individual cost J_i(s) = sum_{e in s_i} ell_e(|s|_e). Kept for the
// sum-to-C consistency check; selfish equilibria are out of scope.
template <typename T>
T player_cost(const CongestionGame<T>& game, const JointStrategy& s, int i) {
  if (i < 0 || i >= game.player_count()) throw std::domain_error("invalid player index");
  const std::vector<int> load_vector = loads(game, s);
  T total(0);
  for (int e : game.strategy(i, s.choices[static_cast<std::size_t>(i)])) {
    total += game.latency(e, load_vector[static_cast<std::size_t>(e)]);
  }
  return total;
}

// (s'_Gamma, s_{-Gamma}): replaces exactly the group members' choices.
template <typename T>
JointStrategy group_deviation(const CongestionGame<T>& game, const JointStrategy& s,
                              const std::vector<int>& group,
                              const std::vector<int>& replacement) {
  game.check_joint(s);
  if (group.empty()) throw std::domain_error("deviation group must be nonempty");
  if (group.size() != replacement.size()) {
    throw std::domain_error("one replacement strategy per group member required");
  }
  std::vector<int> seen = group;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw std::domain_error("deviation group repeats a member");
  }
  JointStrategy result = s;
  for (std::size_t m = 0; m < group.size(); ++m) {
    const int i = group[m];
    if (i < 0 || i >= game.player_count()) throw std::domain_error("unknown group member");
    if (replacement[m] < 0 ||
        replacement[m] >= static_cast<int>(game.strategies(i).size())) {
      throw std::domain_error("replacement strategy index out of range");
    }
    result.choices[static_cast<std::size_t>(i)] = replacement[m];
  }
  return result;
}

// Incremental deviation costing used by the oracle's inner loops: starting
// from a precomputed load vector and base cost, applies a group's strategy
// switch load-by-load and accumulates the cost delta. Results are asserted
// equal to the from-scratch path in tests.
template <typename T>
class DeviationEvaluator {
 public:
  DeviationEvaluator(const CongestionGame<T>& game, const JointStrategy& s)
      : game_(game), base_(s), loads_(loads(game, s)), base_cost_(cost_of_loads(game, loads_)) {}

  const T& base_cost() const { return base_cost_; }
  const std::vector<int>& base_loads() const { return loads_; }

  // C(s'_Gamma, s_{-Gamma}) without rebuilding the full load vector.
  T cost_after(const std::vector<int>& group, const std::vector<int>& replacement) {
    touched_.clear();
    for (std::size_t m = 0; m < group.size(); ++m) {
      const int i = group[m];
      for (int e : game_.strategy(i, base_.choices[static_cast<std::size_t>(i)])) bump(e, -1);
      for (int e : game_.strategy(i, replacement[m])) bump(e, +1);
    }
    T cost = base_cost_;
    for (int e : touched_) {
      const std::size_t eu = static_cast<std::size_t>(e);
      cost += game_.resource_cost(e, loads_[eu] + delta_[eu]) - game_.resource_cost(e, loads_[eu]);
      delta_[eu] = 0;  // reset for the next call
    }
    return cost;
  }

 private:
  void bump(int e, int by) {
    const std::size_t eu = static_cast<std::size_t>(e);
    if (delta_.size() != loads_.size()) delta_.assign(loads_.size(), 0);
    if (delta_[eu] == 0) touched_.push_back(e);
    delta_[eu] += by;
  }

  const CongestionGame<T>& game_;
  JointStrategy base_;
  std::vector<int> loads_;
  T base_cost_;
  std::vector<int> delta_;
  std::vector<int> touched_;
};

}  // namespace kspoa

#endif  // KSPOA_CONGESTION_GAME_H_
