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
#include <vector>

#include "doctest.h"
#include "groupdp/oracle.hpp"
#include "groupdp/pld.hpp"
#include "groupdp/sensitivity.hpp"
#include "testing/analytic.hpp"

namespace {

using groupdp::DeltaCurve;
using groupdp::Direction;
using groupdp::DiscretePld;
using groupdp::GetDeltaForEpsilon;
using groupdp::GetEpsilonForDelta;
using groupdp::InversePrivacyLoss;
using groupdp::MogPld;
using groupdp::PldDiscretization;
using groupdp::PrivacyLoss;
using groupdp::SensitivitySpec;
using groupdp_testing::AnalyticGaussianDelta;

constexpr double kInf = std::numeric_limits<double>::infinity();

SensitivitySpec SingleGaussian() {
  return SensitivitySpec::FromEntries({{1.0, 1.0}});
}

SensitivitySpec HalfMixture() {
  return SensitivitySpec::FromEntries({{0.0, 0.5}, {1.0, 0.5}});
}

TEST_CASE("privacy loss closed forms") {
  CHECK(PrivacyLoss(0.0, SingleGaussian(), 1.0, Direction::kAdd) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // -ln(0.5 (1 + e^{-1/2})), evaluated with extended precision offline.
  CHECK(PrivacyLoss(0.0, HalfMixture(), 1.0, Direction::kAdd) ==
        doctest::Approx(0.21907019637983863).epsilon(1e-13));
  const SensitivitySpec zero = SensitivitySpec::FromEntries({{0.0, 1.0}});
  CHECK(PrivacyLoss(-3.7, zero, 2.0, Direction::kAdd) == 0.0);
  CHECK(PrivacyLoss(12.0, zero, 0.5, Direction::kRemove) == 0.0);
}

TEST_CASE("privacy loss direction symmetry and monotonicity") {
  const SensitivitySpec spec = groupdp::BinomialSensitivities(3, 0.4);
  double previous_add = kInf;
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double add = PrivacyLoss(x, spec, 1.3, Direction::kAdd);
    const double remove = PrivacyLoss(x, spec, 1.3, Direction::kRemove);
    CHECK(remove == doctest::Approx(-add).epsilon(1e-15));
    CHECK(add <= previous_add + 1e-15);
    previous_add = add;
  }
}

TEST_CASE("inverse privacy loss closed forms and round trips") {
  CHECK(InversePrivacyLoss(0.5, SingleGaussian(), 1.0, Direction::kAdd) ==
        doctest::Approx(0.0).epsilon(1e-12));
  const double x = InversePrivacyLoss(0.21907019637983863, HalfMixture(), 1.0,
                                      Direction::kAdd);
  CHECK(x == doctest::Approx(0.0).epsilon(1e-9));
  // Round trips across both directions and a range of losses.
  const SensitivitySpec spec = groupdp::BinomialSensitivities(2, 0.3);
  for (Direction direction : {Direction::kAdd, Direction::kRemove}) {
    for (double t : {-3.0, -0.5, 0.1, 0.9, 4.0}) {
      const double root = InversePrivacyLoss(t, spec, 0.8, direction);
      if (std::isfinite(root)) {
        CHECK(PrivacyLoss(root, spec, 0.8, direction) ==
              doctest::Approx(t).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("inverse privacy loss saturates past the attainable range") {
  // Add-direction losses cannot reach -ln(p0).
  const double cap = -std::log(0.5);
  CHECK(InversePrivacyLoss(cap + 0.1, HalfMixture(), 1.0, Direction::kAdd) ==
        -kInf);
  CHECK(InversePrivacyLoss(cap, HalfMixture(), 1.0, Direction::kAdd) == -kInf);
  // Remove-direction losses stay above ln(p0).
  CHECK(InversePrivacyLoss(std::log(0.5) - 0.1, HalfMixture(), 1.0,
                           Direction::kRemove) == -kInf);
  const SensitivitySpec zero = SensitivitySpec::FromEntries({{0.0, 1.0}});
  CHECK_THROWS_AS(InversePrivacyLoss(0.3, zero, 1.0, Direction::kAdd),
                  std::invalid_argument);
  // Zero-probability entries do not count as usable sensitivities.
  const SensitivitySpec hollow =
      SensitivitySpec::FromEntries({{0.0, 1.0}, {5.0, 0.0}});
  CHECK(hollow.AllZero());
  CHECK_THROWS_AS(InversePrivacyLoss(-0.3, hollow, 1.0, Direction::kAdd),
                  std::invalid_argument);
  // A mixed spec with a dead top entry still inverts through the live ones.
  const SensitivitySpec dead_top =
      SensitivitySpec::FromEntries({{0.0, 0.5}, {1.0, 0.5}, {7.0, 0.0}});
  const double root = InversePrivacyLoss(0.2, dead_top, 1.0, Direction::kAdd);
  CHECK(PrivacyLoss(root, dead_top, 1.0, Direction::kAdd) ==
        doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("mog pld: all-zero spec gives the exact point mass") {
  const SensitivitySpec zero = SensitivitySpec::FromEntries({{0.0, 1.0}});
  const DiscretePld pld = MogPld(zero, 1.0, Direction::kAdd);
  REQUIRE(pld.pmf.size() == 1);
  CHECK(pld.pmf[0] == 1.0);
  CHECK(pld.min_loss_index == 0);
  CHECK(pld.infinity_mass == 0.0);
}

TEST_CASE("mog pld: Gaussian loss distribution has the right mean") {
  // The continuous loss is N(1/(2 sigma^2), 1/sigma^2); ceiling rounding can
  // only shift the discretized mean up, by less than one grid step.
  const PldDiscretization disc{1e-4, 1e-12};
  for (Direction direction : {Direction::kAdd, Direction::kRemove}) {
    const DiscretePld pld = MogPld(SingleGaussian(), 1.0, direction, disc);
    groupdp::internal::NeumaierSum mean;
    for (std::size_t i = 0; i < pld.pmf.size(); ++i) {
      mean.Add(pld.pmf[i] * pld.LossAtIndex(i));
    }
    CHECK(mean.Total() >= 0.5);
    CHECK(mean.Total() <= 0.5 + 1e-4);
  }
}

TEST_CASE("mog pld: add-direction losses capped at -ln p0") {
  const PldDiscretization disc{1e-4, 1e-12};
  const DiscretePld pld = MogPld(HalfMixture(), 1.0, Direction::kAdd, disc);
  const double cap = -std::log(0.5);
  double top_loss_with_mass = -kInf;
  for (std::size_t i = 0; i < pld.pmf.size(); ++i) {
    if (pld.pmf[i] > 0.0) {
      top_loss_with_mass = std::max(top_loss_with_mass, pld.LossAtIndex(i));
    }
  }
  CHECK(top_loss_with_mass <= cap + 1e-4);
  // The grid stops where only tail_mass remains, a hair below the supremum.
  CHECK(top_loss_with_mass >= cap - 1e-3);
  CHECK(pld.infinity_mass <= 1e-12);
}

TEST_CASE("mog pld: mass conservation and validity") {
  const PldDiscretization disc{1e-4, 1e-12};
  for (Direction direction : {Direction::kAdd, Direction::kRemove}) {
    for (int k : {1, 2, 16}) {
      const SensitivitySpec spec = groupdp::BinomialSensitivities(k, 0.05);
      const DiscretePld pld = MogPld(spec, 1.0, direction, disc);
      CHECK(std::abs(pld.TotalMass() - 1.0) < 1e-9);
      CHECK(pld.infinity_mass <= 1.1e-12);
    }
  }
}

TEST_CASE("delta for epsilon: trivial and analytic cases") {
  const DiscretePld point = DiscretePld::PointMassAtZero(1e-4, Direction::kAdd);
  CHECK(GetDeltaForEpsilon(point, 0.0) == 0.0);
  CHECK(GetDeltaForEpsilon(point, 2.0) == 0.0);
  // Very negative epsilon integrates the whole distribution.
  CHECK(GetDeltaForEpsilon(point, -50.0) == doctest::Approx(1.0).epsilon(1e-9));

  const DiscretePld gaussian =
      MogPld(SingleGaussian(), 1.0, Direction::kAdd, {1e-4, 1e-12});
  CHECK(std::abs(GetDeltaForEpsilon(gaussian, 0.0) - 0.38292492254802624) <
        1e-4);
  for (double eps : {0.0, 0.5, 1.0, 2.0}) {
    const double delta = GetDeltaForEpsilon(gaussian, eps);
    const double analytic = AnalyticGaussianDelta(eps, 1.0);
    CHECK(delta >= analytic - 1e-12);
    CHECK(delta - analytic < 1e-4);
  }
}

TEST_CASE("delta for epsilon is nonincreasing in epsilon") {
  const DiscretePld pld =
      MogPld(groupdp::BinomialSensitivities(2, 0.3), 1.0, Direction::kRemove,
             {1e-4, 1e-12});
  double previous = 1.0;
  for (double eps = -1.0; eps <= 3.0; eps += 0.1) {
    const double delta = GetDeltaForEpsilon(pld, eps);
    CHECK(delta <= previous + 1e-15);
    previous = delta;
  }
}

TEST_CASE("delta is nondecreasing in each sensitivity") {
  // Shifting mixture mass to a larger center never helps privacy.
  const PldDiscretization disc{1e-4, 1e-12};
  for (Direction direction : {Direction::kAdd, Direction::kRemove}) {
    double previous_delta = -1.0;
    for (double c : {0.5, 1.0, 1.7}) {
      const SensitivitySpec spec =
          SensitivitySpec::FromEntries({{0.0, 0.5}, {c, 0.5}});
      const double delta =
          GetDeltaForEpsilon(MogPld(spec, 1.0, direction, disc), 0.3);
      CHECK(delta >= previous_delta - 1e-12);
      previous_delta = delta;
    }
  }
}

TEST_CASE("pessimism against quadrature, gap halves with the grid") {
  const SensitivitySpec gaussian = SingleGaussian();
  const SensitivitySpec zero = SensitivitySpec::FromEntries({{0.0, 1.0}});
  for (double eps : {0.0, 1.0}) {
    const double oracle = groupdp::HockeyStickQuadrature(zero, gaussian, 1.0,
                                                         std::exp(eps), 1e-11);
    const double coarse = GetDeltaForEpsilon(
        MogPld(gaussian, 1.0, Direction::kAdd, {1e-4, 1e-12}), eps);
    const double fine = GetDeltaForEpsilon(
        MogPld(gaussian, 1.0, Direction::kAdd, {5e-5, 1e-12}), eps);
    const double coarse_gap = coarse - oracle;
    const double fine_gap = fine - oracle;
    CHECK(coarse_gap > 0.0);
    CHECK(fine_gap > 0.0);
    // First-order in the grid step: halving the grid halves the gap, up to a
    // relative slack absorbing second-order terms and quadrature noise.
    CHECK(fine_gap <= 0.5 * coarse_gap * (1.0 + 1e-3) + 1e-12);
  }
}

TEST_CASE("epsilon for delta: trivial, analytic, and signal cases") {
  const DiscretePld point = DiscretePld::PointMassAtZero(1e-4, Direction::kAdd);
  CHECK(GetEpsilonForDelta(point, 0.5) == 0.0);
  CHECK(GetEpsilonForDelta(point, 1e-9) == 0.0);

  const DiscretePld gaussian =
      MogPld(SingleGaussian(), 1.0, Direction::kAdd, {1e-4, 1e-12});
  CHECK(std::abs(GetEpsilonForDelta(gaussian, 0.38292492254802624)) < 1e-3);

  DiscretePld leaky = DiscretePld::PointMassAtZero(1e-4, Direction::kAdd);
  leaky.pmf[0] = 0.99;
  leaky.infinity_mass = 0.01;
  CHECK(GetEpsilonForDelta(leaky, 0.005) == kInf);
  CHECK_THROWS_AS(GetEpsilonForDelta(gaussian, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GetEpsilonForDelta(gaussian, 1.0), std::invalid_argument);
}

TEST_CASE("delta/epsilon round trip never exceeds the target") {
  for (Direction direction : {Direction::kAdd, Direction::kRemove}) {
    const DiscretePld pld = MogPld(groupdp::BinomialSensitivities(2, 0.4), 1.0,
                                   direction, {1e-4, 1e-12});
    for (double delta : {0.3, 0.05, 1e-3, 1e-6}) {
      const double eps = GetEpsilonForDelta(pld, delta);
      REQUIRE(std::isfinite(eps));
      CHECK(GetDeltaForEpsilon(pld, eps) <= delta);
      // Minimality: stepping below eps must overshoot delta (when eps > 0).
      if (eps > 1e-6) {
        CHECK(GetDeltaForEpsilon(pld, eps - 1e-5) > delta);
      }
    }
  }
}

TEST_CASE("delta curve matches the direct evaluation") {
  const DiscretePld pld = MogPld(groupdp::BinomialSensitivities(3, 0.2), 1.0,
                                 Direction::kRemove, {1e-4, 1e-12});
  const DeltaCurve curve(pld);
  for (double eps = 0.0; eps <= 4.0; eps += 0.37) {
    CHECK(curve.DeltaForEpsilon(eps) ==
          doctest::Approx(GetDeltaForEpsilon(pld, eps)).epsilon(1e-11));
  }
}

TEST_CASE("discrete pld validation") {
  DiscretePld pld = DiscretePld::PointMassAtZero(1e-4, Direction::kAdd);
  CHECK_NOTHROW(pld.CheckValid());
  pld.pmf[0] = 0.5;
  CHECK_THROWS_AS(pld.CheckValid(), std::invalid_argument);
  pld.pmf[0] = 1.0;
  pld.grid_spacing = 0.0;
  CHECK_THROWS_AS(pld.CheckValid(), std::invalid_argument);
}

}  // namespace
