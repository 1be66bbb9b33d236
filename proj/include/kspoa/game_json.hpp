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

#ifndef KSPOA_GAME_JSON_H_
#define KSPOA_GAME_JSON_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kspoa/congestion_game.hpp"

namespace kspoa {

// Game wire format:
//   { "n": int, "basis": "<basis spec>",
//     "resources": [{"alpha": [coef, ...]}, ...],
//     "strategies": [[[resource-id, ...], ...], ...] }
// Coefficients are JSON integers or "p/q" strings in exact mode and JSON
// numbers in float mode; the basis spec decides which mode applies. The
// emitted form is canonical, so serialize(parse(x)) round-trips byte-exactly.

template <typename T>
nlohmann::json coefficient_to_json(const T& value) {
  if constexpr (std::is_same_v<T, Rational>) {
    const BigInt den = boost::multiprecision::denominator(value);
    if (den == 1) {
      const BigInt num = boost::multiprecision::numerator(value);
      // Keeps huge numerators representable; JSON ints cap at 64 bits.
      if (num >= std::numeric_limits<std::int64_t>::min() &&
          num <= std::numeric_limits<std::int64_t>::max()) {
        return num.convert_to<std::int64_t>();
      }
    }
    return format_rational(value);
  } else {
    return value;
  }
}

template <typename T>
T coefficient_from_json(const nlohmann::json& value) {
  if constexpr (std::is_same_v<T, Rational>) {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
    throw std::invalid_argument(
        "exact-mode coefficients must be integers or \"p/q\" strings");
  } else {
    if (value.is_string()) return parse_rational(value.get<std::string>()).convert_to<double>();
    if (value.is_number()) return value.get<double>();
    throw std::invalid_argument("coefficient must be a number");
  }
}

template <typename T>
nlohmann::json game_to_json(const CongestionGame<T>& game) {
  nlohmann::json out;
  out["n"] = game.player_count();
  out["basis"] = game.basis().name();
  nlohmann::json resources = nlohmann::json::array();
  for (const Resource<T>& r : game.resources()) {
    nlohmann::json alpha = nlohmann::json::array();
    for (const T& a : r.alpha) alpha.push_back(coefficient_to_json(a));
    resources.push_back({{"alpha", alpha}});
  }
  out["resources"] = resources;
  nlohmann::json strategies = nlohmann::json::array();
  for (int i = 0; i < game.player_count(); ++i) {
    nlohmann::json per_player = nlohmann::json::array();
    for (const Strategy& strat : game.strategies(i)) per_player.push_back(strat);
    strategies.push_back(per_player);
  }
  out["strategies"] = strategies;
  return out;
}

template <typename T>
CongestionGame<T> game_from_json(const nlohmann::json& in) {
  if (!in.is_object() || !in.contains("n") || !in.contains("basis") ||
      !in.contains("resources") || !in.contains("strategies")) {
    throw std::invalid_argument("game JSON needs n, basis, resources, strategies");
  }
  LatencyBasis basis = parse_basis(in.at("basis").get<std::string>());
  if constexpr (std::is_same_v<T, Rational>) {
    if (!basis.exact()) {
      throw std::invalid_argument("basis " + basis.name() + " requires float mode");
    }
  }
  std::vector<Resource<T>> resources;
  for (const nlohmann::json& r : in.at("resources")) {
    Resource<T> resource;
    for (const nlohmann::json& a : r.at("alpha")) {
      resource.alpha.push_back(coefficient_from_json<T>(a));
    }
    resources.push_back(std::move(resource));
  }
  std::vector<std::vector<Strategy>> strategy_sets;
  for (const nlohmann::json& per_player : in.at("strategies")) {
    std::vector<Strategy> strats;
    for (const nlohmann::json& strat : per_player) strats.push_back(strat.get<Strategy>());
    strategy_sets.push_back(std::move(strats));
  }
  return CongestionGame<T>(in.at("n").get<int>(), std::move(basis), std::move(resources),
                           std::move(strategy_sets));
}

// True when the embedded basis spec supports exact arithmetic; callers use
// this to pick the CongestionGame instantiation.
inline bool game_json_is_exact(const nlohmann::json& in) {
  return parse_basis(in.at("basis").get<std::string>()).exact();
}

inline nlohmann::json joint_strategy_to_json(const JointStrategy& s) {
  return nlohmann::json{{"choices", s.choices}};
}

inline JointStrategy joint_strategy_from_json(const nlohmann::json& in) {
  JointStrategy s;
  s.choices = in.at("choices").get<std::vector<int>>();
  return s;
}

}  // namespace kspoa

#endif  // KSPOA_GAME_JSON_H_
