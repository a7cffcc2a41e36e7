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
// Comparison baselines for the group accountant: the black-box group-privacy
// conversion (example-level (e, d) implies group-level (k*e, k*exp(k*e)*d))
// and the heuristic linear lower bound k * epsilon_1.

#ifndef GROUPDP_BASELINES_HPP_
#define GROUPDP_BASELINES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "groupdp/accountant.hpp"
#include "groupdp/pld.hpp"

namespace groupdp {

struct VadhanPoint {
  double epsilon = 0.0;
  double delta = 0.0;
  // True when the delta term reaches or exceeds 1, i.e. the guarantee is
  // vacuous. Reported rather than clamped so callers can distinguish
  // "vacuous" from "numerically infinite".
  bool saturated = false;
};

// Forward conversion: an example-level (epsilon1, delta1) guarantee gives a
// group-of-k guarantee (k*epsilon1, k*e^{k*epsilon1}*delta1). The delta term
// is assembled in log space; it overflows double well before k*epsilon1
// reaches interesting sizes otherwise.
inline VadhanPoint VadhanForward(double epsilon1, double delta1,
                                 int group_size) {
  if (!(epsilon1 >= 0.0)) {
    throw std::invalid_argument("VadhanForward: epsilon1 must be >= 0.");
  }
  if (!(delta1 >= 0.0 && delta1 < 1.0)) {
    throw std::invalid_argument("VadhanForward: delta1 must be in [0, 1).");
  }
  if (group_size < 1) {
    throw std::invalid_argument("VadhanForward: group_size must be >= 1.");
  }
  const double k = static_cast<double>(group_size);
  VadhanPoint point;
  point.epsilon = k * epsilon1;
  const double log_delta = std::log(k) + point.epsilon + std::log(delta1);
  point.delta = std::exp(log_delta);
  point.saturated = log_delta >= 0.0;
  return point;
}

// Minimum group-level epsilon achievable through the forward conversion:
// the smallest e such that the example-level curve passes through
// (e / k, delta * e^{-e} / k). The required example-level delta shrinks like
// e^{-e}, so for large groups it drops below what the composed PLD can
// resolve (its infinity mass plus one ulp); the search then reports +inf,
// reproducing the numerical failure mode of black-box group conversions.
inline double VadhanGroupEpsilon(const ComposedPlds& example_level,
                                 int group_size, double delta,
                                 double epsilon_cap = kDefaultEpsilonCap) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("VadhanGroupEpsilon: delta must be in (0, 1).");
  }
  if (group_size < 1) {
    throw std::invalid_argument("VadhanGroupEpsilon: group_size must be >= 1.");
  }
  const double k = static_cast<double>(group_size);
  const DeltaCurve add_curve(example_level.add);
  const DeltaCurve remove_curve(example_level.remove);
  const double resolvable_floor =
      std::max(add_curve.infinity_mass(), remove_curve.infinity_mass()) +
      std::numeric_limits<double>::epsilon();

  const auto feasible = [&](double epsilon) {
    const double required_delta1 = delta * std::exp(-epsilon) / k;
    if (required_delta1 < resolvable_floor) return false;
    const double delta1 = std::max(add_curve.DeltaForEpsilon(epsilon / k),
                                   remove_curve.DeltaForEpsilon(epsilon / k));
    return delta1 <= required_delta1;
  };

  if (feasible(0.0)) return 0.0;
  // Coarse scan for the first feasible bracket, then bisection. The
  // feasibility region is an upper interval for every curve seen in practice,
  // but the scan keeps the search honest if the boundary is crossed steeply.
  const double scan_step = 0.05;
  double previous = 0.0;
  double first_feasible = internal::kInf;
  for (double e = scan_step; e <= epsilon_cap + scan_step; e += scan_step) {
    const double clipped = std::min(e, epsilon_cap);
    if (feasible(clipped)) {
      first_feasible = clipped;
      break;
    }
    previous = clipped;
    if (clipped >= epsilon_cap) break;
  }
  if (!std::isfinite(first_feasible)) return internal::kInf;

  double lo = previous, hi = first_feasible;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

inline double VadhanGroupEpsilon(const AccountantConfig& config, double delta,
                                 double epsilon_cap = kDefaultEpsilonCap) {
  AccountantConfig example_level = config;
  example_level.group_size = 1;
  return VadhanGroupEpsilon(ComposeForConfig(example_level), config.group_size,
                            delta, epsilon_cap);
}

// Heuristic comparison curve k * epsilon_1. Reported as a lower bound for
// plotting purposes, not a certified guarantee.
inline double LinearLowerBound(const ComposedPlds& example_level,
                               int group_size, double delta,
                               double epsilon_cap = kDefaultEpsilonCap) {
  if (group_size < 1) {
    throw std::invalid_argument("LinearLowerBound: group_size must be >= 1.");
  }
  return static_cast<double>(group_size) *
         GroupEpsilonDetail(example_level, delta, epsilon_cap).epsilon;
}

inline double LinearLowerBound(const AccountantConfig& config, double delta,
                               double epsilon_cap = kDefaultEpsilonCap) {
  AccountantConfig example_level = config;
  example_level.group_size = 1;
  return LinearLowerBound(ComposeForConfig(example_level), config.group_size,
                          delta, epsilon_cap);
}

}  // namespace groupdp

#endif  // GROUPDP_BASELINES_HPP_
