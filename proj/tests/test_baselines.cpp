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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "groupdp/baselines.hpp"

namespace {

using groupdp::AccountantConfig;
using groupdp::ComposedPlds;
using groupdp::ComposeForConfig;
using groupdp::GroupEpsilonDetail;
using groupdp::LinearLowerBound;
using groupdp::PoissonSampling;
using groupdp::VadhanForward;
using groupdp::VadhanGroupEpsilon;
using groupdp::VadhanPoint;

constexpr double kInf = std::numeric_limits<double>::infinity();

AccountantConfig SmallConfig(int k) {
  AccountantConfig config;
  config.scheme = PoissonSampling{0.05};
  config.sigma = 1.0;
  config.rounds = 40;
  config.group_size = k;
  return config;
}

TEST_CASE("vadhan forward conversion values") {
  const VadhanPoint zero = VadhanForward(0.0, 1e-6, 3);
  CHECK(zero.epsilon == 0.0);
  CHECK(zero.delta == doctest::Approx(3e-6).epsilon(1e-12));
  CHECK_FALSE(zero.saturated);

  const VadhanPoint two = VadhanForward(1.0, 1e-6, 2);
  CHECK(two.epsilon == 2.0);
  CHECK(two.delta == doctest::Approx(1.47781121978613e-05).epsilon(1e-12));
  CHECK_FALSE(two.saturated);

  // 50 e^500 1e-6 is astronomically past 1: saturation flag, not a clamp.
  const VadhanPoint big = VadhanForward(10.0, 1e-6, 50);
  CHECK(big.epsilon == 500.0);
  CHECK(big.saturated);
}

TEST_CASE("vadhan forward is monotone in each argument") {
  double previous = -1.0;
  for (double e1 : {0.0, 0.5, 1.0, 2.0}) {
    const VadhanPoint p = VadhanForward(e1, 1e-7, 3);
    CHECK(p.epsilon >= previous);
    previous = p.epsilon;
  }
  double previous_delta = -1.0;
  for (double d1 : {1e-9, 1e-7, 1e-5}) {
    const VadhanPoint p = VadhanForward(0.5, d1, 3);
    CHECK(p.delta >= previous_delta);
    previous_delta = p.delta;
  }
  previous = -1.0;
  previous_delta = -1.0;
  for (int k : {1, 2, 5, 9}) {
    const VadhanPoint p = VadhanForward(0.5, 1e-7, k);
    CHECK(p.epsilon >= previous);
    CHECK(p.delta >= previous_delta);
    previous = p.epsilon;
    previous_delta = p.delta;
  }
}

TEST_CASE("vadhan forward rejects bad input") {
  CHECK_THROWS_AS(VadhanForward(-0.1, 1e-6, 2), std::invalid_argument);
  CHECK_THROWS_AS(VadhanForward(1.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(VadhanForward(1.0, 1e-6, 0), std::invalid_argument);
}

TEST_CASE("vadhan at k=1 still inflates the accountant epsilon") {
  const ComposedPlds pair = ComposeForConfig(SmallConfig(1));
  const double delta = 1e-5;
  const double eps_accountant = GroupEpsilonDetail(pair, delta).epsilon;
  const double eps_vadhan = VadhanGroupEpsilon(pair, 1, delta);
  REQUIRE(std::isfinite(eps_vadhan));
  CHECK(eps_vadhan > eps_accountant);
}

TEST_CASE("vadhan dominates the group accountant wherever finite") {
  const ComposedPlds pair_k1 = ComposeForConfig(SmallConfig(1));
  const double delta = 1e-5;
  for (int k : {1, 2, 3}) {
    const double eps_vadhan = VadhanGroupEpsilon(pair_k1, k, delta);
    const double eps_group =
        GroupEpsilonDetail(ComposeForConfig(SmallConfig(k)), delta).epsilon;
    CHECK(eps_vadhan >= eps_group - 1e-9);  // +inf counts as the top
  }
}

TEST_CASE("vadhan reports +inf when the required delta is unresolvable") {
  // A fat per-PLD tail mass pushes the composed infinity mass above the
  // example-level delta the conversion would need.
  AccountantConfig config = SmallConfig(1);
  config.tail_mass = 1e-8;
  const ComposedPlds pair = ComposeForConfig(config);
  const double floor = std::max(pair.add.infinity_mass,
                                pair.remove.infinity_mass);
  REQUIRE(floor > 1e-7);  // ~ rounds * tail_mass
  CHECK(VadhanGroupEpsilon(pair, 5, 1e-6) == kInf);
}

TEST_CASE("linear lower bound is exactly k times epsilon_1") {
  const ComposedPlds pair = ComposeForConfig(SmallConfig(1));
  const double delta = 1e-5;
  const double eps1 = GroupEpsilonDetail(pair, delta).epsilon;
  CHECK(LinearLowerBound(pair, 1, delta) == eps1);
  CHECK(LinearLowerBound(pair, 5, delta) == 5.0 * eps1);
}

TEST_CASE("sandwich on a small grid") {
  const double delta = 1e-5;
  const ComposedPlds pair_k1 = ComposeForConfig(SmallConfig(1));
  for (int k : {1, 2, 4}) {
    const double lower = LinearLowerBound(pair_k1, k, delta);
    const double mog =
        GroupEpsilonDetail(ComposeForConfig(SmallConfig(k)), delta).epsilon;
    const double vadhan = VadhanGroupEpsilon(pair_k1, k, delta);
    CHECK(lower <= mog + 1e-9);
    CHECK(mog <= vadhan + 1e-9);  // vadhan may be +inf
  }
}

}  // namespace
