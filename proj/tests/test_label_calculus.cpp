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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kspoa/equilibrium_oracle.hpp"
#include "kspoa/label_calculus.hpp"
#include "kspoa/sampling.hpp"

using namespace kspoa;

namespace {

// Independent oracle: enumerate all zeta-subsets of a player pool where
// the first `a` players use the resource only in s and the next `b` only
// in s', and count subsets realizing each (psi, omega) split.
std::map<std::pair<int, int>, long long> count_splits_brute_force(int n, int zeta, int a, int b) {
  std::map<std::pair<int, int>, long long> counts;
  std::vector<int> mask(static_cast<std::size_t>(n), 0);
  std::fill(mask.begin(), mask.begin() + zeta, 1);
  std::sort(mask.begin(), mask.end());
  do {
    int psi = 0, omega = 0;
    for (int i = 0; i < n; ++i) {
      if (!mask[static_cast<std::size_t>(i)]) continue;
      if (i < a) ++psi;
      else if (i < a + b) ++omega;
    }
    ++counts[{psi, omega}];
  } while (std::next_permutation(mask.begin(), mask.end()));
  return counts;
}

}  // namespace

TEST_CASE("label set size and ordering") {
  const LabelSet labels(2);
  CHECK(labels.size() == 9);  // binom(5,3) - 1
  CHECK(labels.at(0) == Label{0, 0, 1});
  CHECK(labels.at(labels.size() - 1) == Label{2, 0, 0});
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    CHECK(labels.at(i) < labels.at(i + 1));  // strict lexicographic order
  }
  for (int n = 1; n <= 8; ++n) {
    CHECK(LabelSet(n).size() == (binomial(n + 3, 3) - 1).convert_to<std::size_t>());
  }
  CHECK_THROWS_AS(LabelSet(2).index_of(Label{3, 0, 0}), std::domain_error);
}

TEST_CASE("label pair classifies resources") {
  LatencyBasis basis("linear", {BasisFunction::Monomial(1)});
  std::vector<Resource<Rational>> resources{{{Rational(1)}}, {{Rational(1)}}};
  std::vector<std::vector<Strategy>> strategies{{{0}, {1}}, {{0}, {1}}};
  const CongestionGame<Rational> game(2, std::move(basis), std::move(resources),
                                      std::move(strategies));

  SUBCASE("identical strategies give (0, load, 0)") {
    const auto labeling = label_pair(game, JointStrategy{{0, 0}}, JointStrategy{{0, 0}});
    REQUIRE(labeling.size() == 1);
    CHECK(labeling.at(0) == Label{0, 2, 0});
  }
  SUBCASE("abandoned resource gives (2, 0, 0)") {
    const auto labeling = label_pair(game, JointStrategy{{0, 0}}, JointStrategy{{1, 1}});
    CHECK(labeling.at(0) == Label{2, 0, 0});
    CHECK(labeling.at(1) == Label{0, 0, 2});
  }
  SUBCASE("swap gives (1, 0, 1) on both resources") {
    const auto labeling = label_pair(game, JointStrategy{{0, 1}}, JointStrategy{{1, 0}});
    CHECK(labeling.at(0) == Label{1, 0, 1});
    CHECK(labeling.at(1) == Label{1, 0, 1});
  }
}

TEST_CASE("aggregate theta sums coefficients per label") {
  LatencyBasis basis("linear", {BasisFunction::Monomial(1)});
  std::vector<Resource<Rational>> resources{{{Rational(1)}}, {{Rational(1)}},
                                            {{Rational(3) / 2}}};
  // Both players swap e0<->e1; e2 stays with player 0 plus gains player 1.
  std::vector<std::vector<Strategy>> strategies{{{0, 2}, {1, 2}}, {{1}, {0, 2}}};
  const CongestionGame<Rational> game(2, std::move(basis), std::move(resources),
                                      std::move(strategies));
  const auto labeling = label_pair(game, JointStrategy{{0, 0}}, JointStrategy{{1, 1}});
  const auto theta = aggregate_theta(game, labeling);
  const LabelSet labels(2);
  CHECK(theta.at(labels.index_of(Label{1, 0, 1})) == 2);  // e0 and e1 both swap
  CHECK(theta.at(labels.index_of(Label{0, 1, 1})) == Rational(3) / 2);
  CHECK(theta.at(labels.index_of(Label{2, 0, 0})) == 0);  // no resource there
}

TEST_CASE("deviation coefficient examples") {
  CHECK(deviation_coefficient(4, 2, Label{2, 0, 1}, 1, 1) == 2);
  CHECK(deviation_coefficient(4, 2, Label{2, 0, 1}, 3, 0) == 0);  // psi > a
  CHECK(deviation_coefficient(2, 1, Label{1, 0, 1}, 0, 0) == 0);  // binom(0,1)
  CHECK_THROWS_AS(deviation_coefficient(4, 0, Label{1, 0, 0}, 0, 0), std::domain_error);
}

TEST_CASE("deviation coefficients count group splits exactly") {
  for (int n = 1; n <= 6; ++n) {
    for (int zeta = 1; zeta <= n; ++zeta) {
      for (int a = 0; a <= n; ++a) {
        for (int b = 0; a + b <= n; ++b) {
          const auto oracle = count_splits_brute_force(n, zeta, a, b);
          const Label label{a, 0, b};
          for (int psi = 0; psi <= zeta; ++psi) {
            for (int omega = 0; psi + omega <= zeta; ++omega) {
              const auto it = oracle.find({psi, omega});
              const long long expected = it == oracle.end() ? 0 : it->second;
              CHECK(deviation_coefficient(n, zeta, label, psi, omega) == expected);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("deviation coefficients sum to binom(n, zeta)") {
  for (int n = 1; n <= 12; ++n) {
    const LabelSet labels(n);
    for (int zeta = 1; zeta <= n; ++zeta) {
      const BigInt expected = binomial(n, zeta);
      for (const Label& label : labels.labels()) {
        BigInt sum = 0;
        for (int psi = 0; psi <= label.a; ++psi) {
          for (int omega = 0; omega <= label.b && psi + omega <= zeta; ++omega) {
            sum += deviation_coefficient(n, zeta, label, psi, omega);
          }
        }
        CHECK(sum == expected);
      }
    }
  }
}

TEST_CASE("deviation sum examples") {
  const LocalCost square{BasisFunction::Monomial(1)};  // c(x) = x^2
  CHECK(deviation_sum<Rational>(2, 1, Label{1, 0, 0}, square) == 1);
  CHECK(deviation_sum<Rational>(2, 1, Label{1, 0, 1}, square) == 4);
  // (0, x, 0): nobody can switch membership, so binom(n,zeta) * c(x).
  for (int n = 2; n <= 5; ++n) {
    for (int zeta = 1; zeta <= n; ++zeta) {
      CHECK(deviation_sum<Rational>(n, zeta, Label{0, 2, 0}, square) ==
            Rational(binomial(n, zeta)) * 4);
    }
  }
}

TEST_CASE("transcription identity: label form equals direct group enumeration") {
  // The core rewriting step: sum over |Gamma| = zeta of C(s'_Gamma,
  // s_{-Gamma}) must equal the theta-weighted deviation sums.
  std::mt19937_64 rng(2026);
  const LatencyBasis affine = parse_basis("affine");
  const LatencyBasis poly = parse_basis("poly:3");
  SampleSpec spec;
  spec.max_players = 4;
  for (int trial = 0; trial < 60; ++trial) {
    const LatencyBasis& basis = trial % 2 ? affine : poly;
    const auto game = sample_game<Rational>(basis, rng, spec);
    const JointStrategy s = sample_joint_strategy(game, rng);
    const JointStrategy s_prime = sample_joint_strategy(game, rng);
    const auto theta = aggregate_theta(game, label_pair(game, s, s_prime));
    const LabelSet labels(game.player_count());
    for (int zeta = 1; zeta <= game.player_count(); ++zeta) {
      Rational label_form(0);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
          label_form += theta.at(static_cast<int>(i), j) *
                        deviation_sum<Rational>(game.player_count(), zeta, labels.at(i),
                                                basis.local_cost(j));
        }
      }
      // Untouched resources (label omitted) keep their s-load under any
      // deviation; add their constant contribution.
      const auto labeling = label_pair(game, s, s_prime);
      const auto load_vector = loads(game, s);
      Rational untouched(0);
      for (int e = 0; e < game.resource_count(); ++e) {
        if (!labeling.contains(e)) {
          untouched += game.resource_cost(e, load_vector[static_cast<std::size_t>(e)]);
        }
      }
      const Rational direct = sum_group_deviation_costs(game, s, s_prime, zeta);
      CHECK(label_form + Rational(binomial(game.player_count(), zeta)) * untouched == direct);
    }
  }
}

TEST_CASE("parameterized costs reproduce C(s) and C(s')") {
  std::mt19937_64 rng(5);
  const LatencyBasis basis = parse_basis("affine");
  for (int trial = 0; trial < 40; ++trial) {
    const auto game = sample_game<Rational>(basis, rng);
    const JointStrategy s = sample_joint_strategy(game, rng);
    const JointStrategy s_prime = sample_joint_strategy(game, rng);
    const auto theta = aggregate_theta(game, label_pair(game, s, s_prime));
    const LabelSet labels(game.player_count());
    Rational c_s(0), c_sp(0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Label& label = labels.at(i);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        c_s += theta.at(static_cast<int>(i), j) *
               basis.local_cost(j).eval<Rational>(label.a + label.x);
        c_sp += theta.at(static_cast<int>(i), j) *
                basis.local_cost(j).eval<Rational>(label.b + label.x);
      }
    }
    CHECK(c_s == system_cost(game, s));
    CHECK(c_sp == system_cost(game, s_prime));
  }
}
