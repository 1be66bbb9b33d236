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

#ifndef KSPOA_WORST_CASE_GEN_H_
#define KSPOA_WORST_CASE_GEN_H_

#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "kspoa/equilibrium_oracle.hpp"
#include "kspoa/label_calculus.hpp"

namespace kspoa {

// Position of a constructed resource: which label block, which player
// permutation, which slot on the ring.
struct RingPosition {
  Label label;
  int permutation = 0;
  int position = 0;
};

// The materialized lower-bound game: every player has exactly two
// strategies (index 0 = the intended k-strong NE, index 1 = the intended
// optimal), and every ring resource carries its label's theta as scaling.
template <typename T>
struct RingGame {
  CongestionGame<T> game;
  JointStrategy kne;
  JointStrategy opt;
  ThetaVector<T> theta;
  LocalCost cost_fn;
  std::vector<RingPosition> resource_index;  // by resource id
};

template <typename T>
struct RingCosts {
  T kne{};
  T opt{};
  T deviation{};  // sum over all groups of size zeta
};

// Resource count n * n! * (number of positive-theta labels); zero-theta
// label blocks contribute nothing and are skipped.
template <typename T>
std::uint64_t ring_resource_count(int n, const ThetaVector<T>& theta) {
  std::uint64_t factorial = 1;
  for (int i = 2; i <= n; ++i) factorial *= static_cast<std::uint64_t>(i);
  std::uint64_t active = 0;
  for (const T& v : theta.values) {
    if (v > T(0)) ++active;
  }
  return static_cast<std::uint64_t>(n) * factorial * active;
}

// Builds G_theta: one ring of n resources per (positive-theta label,
// player permutation). Player i covers positions sigma(i)..sigma(i)+a+x-1
// (mod n) in its first strategy and sigma(i)+a..sigma(i)+a+x+b-1 (mod n)
// in its second, on every ring.
template <typename T>
RingGame<T> construct(int n, const ThetaVector<T>& theta, const LocalCost& cost_fn,
                      int n_cap = 6) {
  if (n < 1) throw std::domain_error("construction needs n >= 1");
  if (n > n_cap) {
    throw ResourceLimitError("construction capped at n = " + std::to_string(n_cap) +
                             " (resource count scales with n!)");
  }
  if (theta.n != n || theta.basis_count != 1) {
    throw std::domain_error("theta must be single-basis and sized for n");
  }
  const LabelSet labels(n);
  std::vector<int> active;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const T& v = theta.at(static_cast<int>(i));
    if (v < T(0)) throw std::domain_error("theta entries must be nonnegative");
    if (v > T(0)) active.push_back(static_cast<int>(i));
  }
  if (active.empty()) throw std::domain_error("theta must have a positive entry");

  std::vector<Resource<T>> resources;
  std::vector<RingPosition> index;
  std::vector<Strategy> kne_strats(static_cast<std::size_t>(n));
  std::vector<Strategy> opt_strats(static_cast<std::size_t>(n));

  std::vector<int> sigma(static_cast<std::size_t>(n));
  for (int label_idx : active) {
    const Label label = labels.at(static_cast<std::size_t>(label_idx));
    std::iota(sigma.begin(), sigma.end(), 0);
    int perm = 0;
    do {
      const int base = static_cast<int>(resources.size());
      for (int pos = 0; pos < n; ++pos) {
        resources.push_back(Resource<T>{{theta.at(label_idx)}});
        index.push_back(RingPosition{label, perm, pos});
      }
      for (int i = 0; i < n; ++i) {
        const int start = sigma[static_cast<std::size_t>(i)];
        for (int t = 0; t < label.a + label.x; ++t) {
          kne_strats[static_cast<std::size_t>(i)].push_back(base + (start + t) % n);
        }
        for (int t = 0; t < label.x + label.b; ++t) {
          opt_strats[static_cast<std::size_t>(i)].push_back(base + (start + label.a + t) % n);
        }
      }
      ++perm;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
  }

  std::vector<std::vector<Strategy>> strategy_sets;
  for (int i = 0; i < n; ++i) {
    strategy_sets.push_back({kne_strats[static_cast<std::size_t>(i)],
                             opt_strats[static_cast<std::size_t>(i)]});
  }
  // Named by its own grammar spec so the emitted game JSON parses back.
  LatencyBasis basis(cost_fn.latency.spec_string(n), {cost_fn.latency});
  RingGame<T> ring{
      CongestionGame<T>(n, std::move(basis), std::move(resources), std::move(strategy_sets)),
      JointStrategy{std::vector<int>(static_cast<std::size_t>(n), 0)},
      JointStrategy{std::vector<int>(static_cast<std::size_t>(n), 1)},
      theta,
      cost_fn,
      std::move(index)};
  return ring;
}

// Closed-form cost identities of the construction, computed without
// touching the game engine: C(kne), C(opt), and the total deviation cost
// over all groups of size zeta.
template <typename T>
RingCosts<T> analytic_costs(const RingGame<T>& ring, int zeta) {
  const int n = ring.game.player_count();
  if (zeta < 1 || zeta > n) throw std::domain_error("zeta must be in 1..n");
  const LabelSet labels(n);
  T factorial(1);
  for (int i = 2; i <= n; ++i) factorial *= T(i);
  const T scale = T(n) * factorial;
  RingCosts<T> costs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const T& th = ring.theta.at(static_cast<int>(i));
    if (th == T(0)) continue;
    const Label& label = labels.at(i);
    costs.kne += scale * th * ring.cost_fn.template eval<T>(label.a + label.x);
    costs.opt += scale * th * ring.cost_fn.template eval<T>(label.b + label.x);
    costs.deviation += scale * th * deviation_sum<T>(n, zeta, label, ring.cost_fn);
  }
  return costs;
}

// Q_k feasibility of theta for the construction's cost function: every
// equilibrium row for zeta in 1..k must hold.
template <typename T>
bool theta_q_feasible(const ThetaVector<T>& theta, int k, const LocalCost& cost_fn,
                      const Compare<T>& cmp = {}) {
  const LabelSet labels(theta.n);
  for (int zeta = 1; zeta <= k; ++zeta) {
    const T groups = binomial_as<T>(theta.n, zeta);
    T row(0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Label& label = labels.at(i);
      row += theta.at(static_cast<int>(i)) *
             (groups * cost_fn.eval<T>(label.a + label.x) -
              deviation_sum<T>(theta.n, zeta, label, cost_fn));
    }
    if (!cmp.le(row, T(0))) return false;
  }
  return true;
}

template <typename T>
struct ConstructionReport {
  bool costs_match = false;        // engine C(kne), C(opt) vs closed form
  bool symmetry_ok = false;        // deviation cost group-independent
  bool deviation_identity_ok = false;  // binom-multiple matches closed form
  bool q_feasible = false;
  bool equilibrium_ok = false;     // is_k_strong(kne, k), when q_feasible
  bool ratio_ok = false;
  Extended<T> realized_ratio;
  std::vector<std::string> failures;

  bool ok() const {
    return costs_match && symmetry_ok && deviation_identity_ok &&
           (!q_feasible || equilibrium_ok) && ratio_ok;
  }
};

// Correctness gate over the constructed instance: every mismatch is
// reported in detail, nothing is a soft warning.
template <typename T>
ConstructionReport<T> verify_construction(const RingGame<T>& ring, int k,
                                          const Compare<T>& cmp = {}) {
  const int n = ring.game.player_count();
  if (k < 1 || k > n) throw std::domain_error("k must be in 1..n");
  ConstructionReport<T> report;
  auto fail = [&](const std::string& message) { report.failures.push_back(message); };

  const T engine_kne = system_cost(ring.game, ring.kne);
  const T engine_opt = system_cost(ring.game, ring.opt);
  const RingCosts<T> base = analytic_costs(ring, 1);
  report.costs_match = cmp.eq(engine_kne, base.kne) && cmp.eq(engine_opt, base.opt);
  if (!report.costs_match) {
    fail("engine costs (" + to_decimal(to_double(engine_kne)) + ", " +
         to_decimal(to_double(engine_opt)) + ") differ from closed form (" +
         to_decimal(to_double(base.kne)) + ", " + to_decimal(to_double(base.opt)) + ")");
  }

  report.symmetry_ok = true;
  report.deviation_identity_ok = true;
  DeviationEvaluator<T> eval(ring.game, ring.kne);
  for (int zeta = 1; zeta <= k; ++zeta) {
    const RingCosts<T> costs = analytic_costs(ring, zeta);
    std::optional<T> first_cost;
    oracle_internal::for_each_group(n, zeta, [&](const std::vector<int>& group) {
      if (static_cast<int>(group.size()) != zeta) return true;
      const std::vector<int> to_opt(group.size(), 1);
      const T cost = eval.cost_after(group, to_opt);
      if (!first_cost) {
        first_cost = cost;
      } else if (!cmp.eq(cost, *first_cost)) {
        report.symmetry_ok = false;
        fail("deviation cost differs between groups at zeta " + std::to_string(zeta));
        return false;
      }
      return true;
    });
    if (first_cost &&
        !cmp.eq(binomial_as<T>(n, zeta) * (*first_cost), costs.deviation)) {
      report.deviation_identity_ok = false;
      fail("group deviation cost times binom(n,zeta) misses closed form at zeta " +
           std::to_string(zeta));
    }
  }

  report.q_feasible = theta_q_feasible(ring.theta, k, ring.cost_fn, cmp);
  if (report.q_feasible) {
    const KStrongCheck<T> check = is_k_strong(ring.game, ring.kne, k, cmp);
    report.equilibrium_ok = check.is_equilibrium;
    if (!check.is_equilibrium) {
      std::ostringstream msg;
      msg << "kne fails the k-strong check despite feasible theta; witness group {";
      for (std::size_t i = 0; i < check.witness->group.size(); ++i) {
        if (i) msg << ",";
        msg << check.witness->group[i];
      }
      msg << "}";
      fail(msg.str());
    }
  }

  // Realized ratio against the theta form of the same quantity.
  const LabelSet labels(n);
  T theta_kne(0), theta_opt(0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label& label = labels.at(i);
    theta_kne += ring.theta.at(static_cast<int>(i)) * ring.cost_fn.template eval<T>(label.a + label.x);
    theta_opt += ring.theta.at(static_cast<int>(i)) * ring.cost_fn.template eval<T>(label.b + label.x);
  }
  if (cmp.is_zero(engine_opt)) {
    report.realized_ratio = Extended<T>::Infinite();
    report.ratio_ok = cmp.is_zero(theta_opt);
  } else {
    report.realized_ratio = Extended<T>::Finite(engine_kne / engine_opt);
    report.ratio_ok = cmp.eq(engine_kne * theta_opt, engine_opt * theta_kne);
  }
  if (!report.ratio_ok) fail("realized ratio disagrees with the theta form");
  return report;
}

}  // namespace kspoa

#endif  // KSPOA_WORST_CASE_GEN_H_
