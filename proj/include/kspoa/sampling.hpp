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

#ifndef KSPOA_SAMPLING_H_
#define KSPOA_SAMPLING_H_

#include <random>

#include "kspoa/congestion_game.hpp"

namespace kspoa {

struct SampleSpec {
  int min_players = 1;
  int max_players = 3;
  int max_resources = 4;
  int max_strategies = 3;
  int max_coefficient = 3;  // alpha drawn from {0, .., max} / {1, 2}
};

// Seeded random game in the class generated by the basis. Strategy sets
// are random resource subsets (possibly empty sets, never an empty list of
// strategies); coefficients are small nonnegative rationals.
template <typename T>
CongestionGame<T> sample_game(const LatencyBasis& basis, std::mt19937_64& rng,
                              const SampleSpec& spec = {}) {
  std::uniform_int_distribution<int> players(spec.min_players, spec.max_players);
  std::uniform_int_distribution<int> resource_count(1, spec.max_resources);
  std::uniform_int_distribution<int> numerator(0, spec.max_coefficient);
  std::uniform_int_distribution<int> denominator(1, 2);
  const int n = players(rng);
  const int m = resource_count(rng);

  std::vector<Resource<T>> resources;
  for (int e = 0; e < m; ++e) {
    Resource<T> r;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const int num = numerator(rng);
      const int den = denominator(rng);
      if constexpr (std::is_same_v<T, Rational>) {
        r.alpha.push_back(Rational(num) / den);
      } else {
        r.alpha.push_back(static_cast<T>(num) / static_cast<T>(den));
      }
    }
    resources.push_back(std::move(r));
  }

  std::uniform_int_distribution<int> strategy_count(1, spec.max_strategies);
  std::bernoulli_distribution member(0.5);
  std::vector<std::vector<Strategy>> strategy_sets;
  for (int i = 0; i < n; ++i) {
    std::vector<Strategy> strats;
    const int count = strategy_count(rng);
    for (int t = 0; t < count; ++t) {
      Strategy strat;
      for (int e = 0; e < m; ++e) {
        if (member(rng)) strat.push_back(e);
      }
      strats.push_back(std::move(strat));
    }
    strategy_sets.push_back(std::move(strats));
  }
  return CongestionGame<T>(n, basis, std::move(resources), std::move(strategy_sets));
}

template <typename T>
JointStrategy sample_joint_strategy(const CongestionGame<T>& game, std::mt19937_64& rng) {
  JointStrategy s;
  for (int i = 0; i < game.player_count(); ++i) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(game.strategies(i).size()) - 1);
    s.choices.push_back(pick(rng));
  }
  return s;
}

}  // namespace kspoa

#endif  // KSPOA_SAMPLING_H_
