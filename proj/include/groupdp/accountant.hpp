// Copyright 2026 The GroupDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Group-level (epsilon, delta) accounting for T-round DP-SGD. The dominating
// pair for a group of size k is a scalar mixture-of-Gaussians mechanism whose
// sensitivity distribution is Binom(k, q) under Poisson sampling and
// 2 * Hypergeom(B, n + k, k) under fixed-batch sampling. Both the add and the
// remove adjacency must satisfy the target bound.

#ifndef GROUPDP_ACCOUNTANT_HPP_
#define GROUPDP_ACCOUNTANT_HPP_

#include <algorithm>
#include <stdexcept>
#include <variant>

#include "groupdp/composition.hpp"
#include "groupdp/pld.hpp"
#include "groupdp/sensitivity.hpp"

namespace groupdp {

struct PoissonSampling {
  double sampling_probability = 0.0;  // per-example inclusion probability
};

struct FixedBatchSampling {
  int batch_size = 0;
  int dataset_size = 0;
};

using SamplingScheme = std::variant<PoissonSampling, FixedBatchSampling>;

struct AccountantConfig {
  double sigma = 0.0;   // noise multiplier, in clip-norm units
  int rounds = 0;       // number of composed DP-SGD steps
  int group_size = 0;   // k, the number of added or removed examples
  SamplingScheme scheme;
  double grid_spacing = 1e-4;
  double tail_mass = 1e-12;
  double truncation_mass = kDefaultTruncationMass;

  void CheckValid() const {
    if (!(sigma > 0.0)) {
      throw std::invalid_argument("AccountantConfig: sigma must be positive.");
    }
    if (rounds < 1) {
      throw std::invalid_argument("AccountantConfig: rounds must be >= 1.");
    }
    if (group_size < 0) {
      throw std::invalid_argument("AccountantConfig: group_size must be >= 0.");
    }
    if (!(grid_spacing > 0.0)) {
      throw std::invalid_argument(
          "AccountantConfig: grid_spacing must be positive.");
    }
    if (!(tail_mass > 0.0 && tail_mass < 1.0)) {
      throw std::invalid_argument(
          "AccountantConfig: tail_mass must be in (0, 1).");
    }
    if (truncation_mass < 0.0) {
      throw std::invalid_argument(
          "AccountantConfig: truncation_mass must be >= 0.");
    }
    if (const auto* poisson = std::get_if<PoissonSampling>(&scheme)) {
      if (!(poisson->sampling_probability >= 0.0 &&
            poisson->sampling_probability <= 1.0)) {
        throw std::invalid_argument(
            "AccountantConfig: Poisson sampling probability outside [0, 1].");
      }
    } else {
      const auto& batch = std::get<FixedBatchSampling>(scheme);
      if (batch.batch_size < 1 || batch.batch_size > batch.dataset_size) {
        throw std::invalid_argument(
            "AccountantConfig: need 1 <= batch_size <= dataset_size.");
      }
    }
  }
};

// The per-round sensitivity distribution of the dominating pair.
inline SensitivitySpec DominatingSpec(const AccountantConfig& config) {
  config.CheckValid();
  if (const auto* poisson = std::get_if<PoissonSampling>(&config.scheme)) {
    return BinomialSensitivities(config.group_size,
                                 poisson->sampling_probability);
  }
  const auto& batch = std::get<FixedBatchSampling>(config.scheme);
  return HypergeometricSensitivities(batch.batch_size, batch.dataset_size,
                                     config.group_size);
}

// The T-fold composed PLDs for both adjacency directions.
struct ComposedPlds {
  DiscretePld add;
  DiscretePld remove;
};

inline ComposedPlds ComposeForConfig(const AccountantConfig& config) {
  const SensitivitySpec spec = DominatingSpec(config);
  const PldDiscretization discretization{config.grid_spacing, config.tail_mass};
  ComposedPlds composed{
      SelfCompose(MogPld(spec, config.sigma, Direction::kAdd, discretization),
                  config.rounds, config.truncation_mass),
      SelfCompose(MogPld(spec, config.sigma, Direction::kRemove, discretization),
                  config.rounds, config.truncation_mass)};
  return composed;
}

// delta at the given epsilon under the add-or-remove-up-to-k adjacency: both
// directions must satisfy the bound, so the worse one is reported.
inline double GroupDelta(const ComposedPlds& composed, double epsilon) {
  return std::max(GetDeltaForEpsilon(composed.add, epsilon),
                  GetDeltaForEpsilon(composed.remove, epsilon));
}

inline double GroupDelta(const AccountantConfig& config, double epsilon) {
  return GroupDelta(ComposeForConfig(config), epsilon);
}

struct GroupEpsilonResult {
  double epsilon = 0.0;
  double epsilon_add = 0.0;
  double epsilon_remove = 0.0;
  Direction dominant_direction = Direction::kAdd;
};

inline GroupEpsilonResult GroupEpsilonDetail(
    const ComposedPlds& composed, double delta,
    double epsilon_cap = kDefaultEpsilonCap) {
  GroupEpsilonResult result;
  result.epsilon_add = GetEpsilonForDelta(composed.add, delta, epsilon_cap);
  result.epsilon_remove = GetEpsilonForDelta(composed.remove, delta, epsilon_cap);
  result.dominant_direction = result.epsilon_remove >= result.epsilon_add
                                  ? Direction::kRemove
                                  : Direction::kAdd;
  result.epsilon = std::max(result.epsilon_add, result.epsilon_remove);
  return result;
}

// Minimum epsilon such that GroupDelta(config, epsilon) <= delta; +inf when
// delta is unreachable (below the composed infinity mass or past the cap).
inline double GroupEpsilon(const AccountantConfig& config, double delta,
                           double epsilon_cap = kDefaultEpsilonCap) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("GroupEpsilon: delta must be in (0, 1).");
  }
  return GroupEpsilonDetail(ComposeForConfig(config), delta, epsilon_cap)
      .epsilon;
}

}  // namespace groupdp

#endif  // GROUPDP_ACCOUNTANT_HPP_
