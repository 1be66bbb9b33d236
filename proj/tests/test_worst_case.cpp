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

#include "kspoa/poa_lp.hpp"
#include "kspoa/worst_case_gen.hpp"

using namespace kspoa;

namespace {

const LocalCost kSquare{BasisFunction::Monomial(1)};  // c(x) = x^2

// The optimal theta of the two-player single-deviator program: mass 2/3 on
// (1, 0, 0) and 1/3 on (1, 0, 1), realizing the ratio 3.
ThetaVector<Rational> two_player_optimal_theta() {
  ThetaVector<Rational> theta(2, 1);
  const LabelSet labels(2);
  theta.at(labels.index_of(Label{1, 0, 0})) = Rational(2) / 3;
  theta.at(labels.index_of(Label{1, 0, 1})) = Rational(1) / 3;
  return theta;
}

ThetaVector<Rational> theta_from_q(int n, int k, const LocalCost& c) {
  const auto sol = solve(build_Q<Rational>(n, k, c));
  REQUIRE(sol.status == LpStatus::kOptimal);
  ThetaVector<Rational> theta(n, 1);
  for (std::size_t i = 0; i < sol.point.size(); ++i) {
    theta.at(static_cast<int>(i)) = sol.point[i];
  }
  return theta;
}

}  // namespace

TEST_CASE("two-player construction has the expected shape") {
  const auto theta = two_player_optimal_theta();
  const auto ring = construct(2, theta, kSquare);
  CHECK(ring.game.resource_count() == 8);  // 2 labels * 2! perms * ring of 2
  CHECK(ring_resource_count(2, theta) == 8);
  CHECK(ring.kne.choices == std::vector<int>{0, 0});
  CHECK(ring.opt.choices == std::vector<int>{1, 1});

  // Every resource carries its label's theta and the loads follow the
  // label: a+x players under kne, b+x under opt.
  const auto kne_loads = loads(ring.game, ring.kne);
  const auto opt_loads = loads(ring.game, ring.opt);
  for (int e = 0; e < ring.game.resource_count(); ++e) {
    const RingPosition& pos = ring.resource_index[static_cast<std::size_t>(e)];
    const LabelSet labels(2);
    CHECK(ring.game.resources()[static_cast<std::size_t>(e)].alpha[0] ==
          theta.at(labels.index_of(pos.label)));
    CHECK(kne_loads[static_cast<std::size_t>(e)] == pos.label.a + pos.label.x);
    CHECK(opt_loads[static_cast<std::size_t>(e)] == pos.label.b + pos.label.x);
  }
}

TEST_CASE("closed-form costs match the engine") {
  const auto ring = construct(2, two_player_optimal_theta(), kSquare);
  const auto costs = analytic_costs(ring, 1);
  CHECK(costs.kne == 4);
  CHECK(costs.opt == Rational(4) / 3);
  CHECK(costs.deviation == 8);
  CHECK(system_cost(ring.game, ring.kne) == costs.kne);
  CHECK(system_cost(ring.game, ring.opt) == costs.opt);
  // Total deviation cost over both singleton groups equals the closed form.
  CHECK(sum_group_deviation_costs(ring.game, ring.kne, ring.opt, 1) == costs.deviation);
}

TEST_CASE("the optimal theta verifies end to end at ratio 3") {
  const auto ring = construct(2, two_player_optimal_theta(), kSquare);
  const auto report = verify_construction(ring, 1);
  CHECK(report.costs_match);
  CHECK(report.symmetry_ok);
  CHECK(report.deviation_identity_ok);
  CHECK(report.q_feasible);
  CHECK(report.equilibrium_ok);
  CHECK(report.ratio_ok);
  CHECK(report.ok());
  CHECK(report.failures.empty());
  REQUIRE_FALSE(report.realized_ratio.infinite);
  CHECK(report.realized_ratio.value == 3);
}

TEST_CASE("infeasible theta is reported and the profile is not stable") {
  // All mass on (1, 0, 0): the equilibrium row is violated and every
  // player would rather drop out.
  ThetaVector<Rational> theta(2, 1);
  theta.at(LabelSet(2).index_of(Label{1, 0, 0})) = Rational(1);
  const auto ring = construct(2, theta, kSquare);
  CHECK_FALSE(theta_q_feasible(theta, 1, kSquare));
  const auto report = verify_construction(ring, 1);
  CHECK_FALSE(report.q_feasible);
  CHECK(report.costs_match);
  CHECK(report.realized_ratio.infinite);  // opt cost is 0 here
  CHECK_FALSE(is_k_strong(ring.game, ring.kne, 1).is_equilibrium);
}

TEST_CASE("pure overlap labels give ratio 1") {
  ThetaVector<Rational> theta(2, 1);
  theta.at(LabelSet(2).index_of(Label{0, 1, 0})) = Rational(1);
  const auto ring = construct(2, theta, kSquare);
  for (int k = 1; k <= 2; ++k) {
    const auto report = verify_construction(ring, k);
    CHECK(report.ok());
    REQUIRE_FALSE(report.realized_ratio.infinite);
    CHECK(report.realized_ratio.value == 1);
  }
}

TEST_CASE("construction realizes the LP lower bound") {
  for (int n = 2; n <= 3; ++n) {
    const auto sol = solve(build_Q<Rational>(n, 1, kSquare));
    REQUIRE(sol.status == LpStatus::kOptimal);
    REQUIRE(sol.value > 0);
    const auto ring = construct(n, theta_from_q(n, 1, kSquare), kSquare);
    const auto report = verify_construction(ring, 1);
    CHECK(report.ok());
    CHECK(report.equilibrium_ok);
    REQUIRE_FALSE(report.realized_ratio.infinite);
    CHECK(report.realized_ratio.value == Rational(1) / sol.value);
  }
}

TEST_CASE("construction rejects bad input") {
  ThetaVector<Rational> theta(2, 1);
  CHECK_THROWS_AS(construct(2, theta, kSquare), std::domain_error);  // all zero
  theta.at(0) = Rational(-1);
  CHECK_THROWS_AS(construct(2, theta, kSquare), std::domain_error);  // negative
  ThetaVector<Rational> wrong(3, 1);
  wrong.at(0) = Rational(1);
  CHECK_THROWS_AS(construct(2, wrong, kSquare), std::domain_error);  // size

  ThetaVector<Rational> big(7, 1);
  big.at(0) = Rational(1);
  CHECK_THROWS_AS(construct(7, big, kSquare), ResourceLimitError);  // n cap
}
