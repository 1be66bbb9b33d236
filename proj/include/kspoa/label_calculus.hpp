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

#ifndef KSPOA_LABEL_CALCULUS_H_
#define KSPOA_LABEL_CALCULUS_H_

#include <map>
#include <stdexcept>
#include <vector>

#include "kspoa/congestion_game.hpp"
#include "kspoa/latency_basis.hpp"
#include "kspoa/numeric.hpp"

namespace kspoa {

// Classification of one resource relative to a strategy pair (s, s'):
// a players use it only in s, x in both, b only in s'.
struct Label {
  int a = 0;
  int x = 0;
  int b = 0;

  auto operator<=>(const Label&) const = default;
};

// All labels with 1 <= a+x+b <= n, in lexicographic (a, x, b) order. This
// order fixes LP column order and CSV output order everywhere.
class LabelSet {
 public:
  explicit LabelSet(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("label set needs n >= 1");
    for (int a = 0; a <= n; ++a) {
      for (int x = 0; a + x <= n; ++x) {
        for (int b = (a + x == 0 ? 1 : 0); a + x + b <= n; ++b) {
          index_.emplace(Label{a, x, b}, static_cast<int>(labels_.size()));
          labels_.push_back(Label{a, x, b});
        }
      }
    }
  }

  int n() const { return n_; }
  const std::vector<Label>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const Label& at(std::size_t i) const { return labels_.at(i); }

  int index_of(const Label& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw std::domain_error("label outside the index set");
    return it->second;
  }

 private:
  int n_;
  std::vector<Label> labels_;
  std::map<Label, int> index_;
};

// Aggregate cost scaling factors theta(a, x, b[, j]): one nonnegative entry
// per label, times one slot per basis function.
template <typename T>
struct ThetaVector {
  int n = 0;
  std::size_t basis_count = 1;
  std::vector<T> values;  // label-major: values[label * basis_count + j]

  ThetaVector() = default;
  ThetaVector(int n_players, std::size_t basis_size)
      : n(n_players), basis_count(basis_size) {
    values.assign(LabelSet(n_players).size() * basis_size, T(0));
  }

  T& at(int label_index, std::size_t j = 0) {
    return values.at(static_cast<std::size_t>(label_index) * basis_count + j);
  }
  const T& at(int label_index, std::size_t j = 0) const {
    return values.at(static_cast<std::size_t>(label_index) * basis_count + j);
  }
};

// Per-resource labels for a strategy pair; resources untouched by both
// strategies (a+x+b = 0) are omitted.
template <typename T>
std::map<int, Label> label_pair(const CongestionGame<T>& game, const JointStrategy& s,
                                const JointStrategy& s_prime) {
  game.check_joint(s);
  game.check_joint(s_prime);
  std::map<int, Label> result;
  for (int i = 0; i < game.player_count(); ++i) {
    const Strategy& in_s = game.strategy(i, s.choices[static_cast<std::size_t>(i)]);
    const Strategy& in_sp = game.strategy(i, s_prime.choices[static_cast<std::size_t>(i)]);
    for (int e : in_s) {
      const bool both = std::binary_search(in_sp.begin(), in_sp.end(), e);
      (both ? result[e].x : result[e].a) += 1;
    }
    for (int e : in_sp) {
      if (!std::binary_search(in_s.begin(), in_s.end(), e)) result[e].b += 1;
    }
  }
  return result;
}

// theta(a, x, b, j) = sum of alpha_e^j over resources e with that label.
template <typename T>
ThetaVector<T> aggregate_theta(const CongestionGame<T>& game,
                               const std::map<int, Label>& labeling) {
  ThetaVector<T> theta(game.player_count(), game.basis().size());
  const LabelSet labels(game.player_count());
  for (const auto& [e, label] : labeling) {
    const int idx = labels.index_of(label);
    for (std::size_t j = 0; j < game.basis().size(); ++j) {
      theta.at(idx, j) += game.resources()[static_cast<std::size_t>(e)].alpha[j];
    }
  }
  return theta;
}

// Number of size-zeta groups whose members split as psi leaving the
// resource and omega joining it: binom(a,psi) binom(b,omega)
// binom(n-a-b, zeta-psi-omega), with the global zero convention.
inline BigInt deviation_coefficient(int n, int zeta, const Label& label, int psi, int omega) {
  if (n < 1 || zeta < 1 || zeta > n) throw std::domain_error("zeta must be in 1..n");
  return binomial(label.a, psi) * binomial(label.b, omega) *
         binomial(n - label.a - label.b, zeta - psi - omega);
}

// Per-label slice of sum_{|Gamma|=zeta} C(s'_Gamma, s_{-Gamma}):
// sum over feasible (psi, omega) of coefficient * c(a + x + omega - psi).
template <typename T>
T deviation_sum(int n, int zeta, const Label& label, const LocalCost& c) {
  if (n < 1 || zeta < 1 || zeta > n) throw std::domain_error("zeta must be in 1..n");
  T total(0);
  for (int psi = 0; psi <= label.a; ++psi) {
    for (int omega = 0; omega <= label.b && psi + omega <= zeta; ++omega) {
      const BigInt coeff = deviation_coefficient(n, zeta, label, psi, omega);
      if (coeff == 0) continue;
      if constexpr (std::is_same_v<T, Rational>) {
        total += Rational(coeff) * c.eval<T>(label.a + label.x + omega - psi);
      } else {
        total += coeff.convert_to<T>() * c.eval<T>(label.a + label.x + omega - psi);
      }
    }
  }
  return total;
}

}  // namespace kspoa

#endif  // KSPOA_LABEL_CALCULUS_H_
