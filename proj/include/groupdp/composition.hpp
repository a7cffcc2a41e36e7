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
// Composition of privacy-loss distributions: the loss of a product mechanism
// is the sum of the per-round losses, so composing PLDs is PMF convolution.

#ifndef GROUPDP_COMPOSITION_HPP_
#define GROUPDP_COMPOSITION_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupdp/internal/fft.hpp"
#include "groupdp/internal/math.hpp"
#include "groupdp/pld.hpp"

namespace groupdp {

// Per-convolution tail mass retired during self-composition. Upper-tail mass
// moves into infinity_mass, lower-tail mass onto the smallest retained grid
// point; both movements are pessimistic.
inline constexpr double kDefaultTruncationMass = 1e-15;

// Below this size direct convolution beats the FFT and has no ringing.
inline constexpr std::size_t kDirectConvolutionThreshold = 1024;

// Convolution of two PLDs on the same grid and direction. Infinity masses
// combine as 1 - (1 - a)(1 - b); grid offsets add.
inline DiscretePld Convolve(const DiscretePld& a, const DiscretePld& b) {
  if (a.grid_spacing != b.grid_spacing) {
    throw std::invalid_argument("Convolve: mismatched grid spacings.");
  }
  if (a.direction != b.direction) {
    throw std::invalid_argument("Convolve: mismatched directions.");
  }

  DiscretePld out;
  out.grid_spacing = a.grid_spacing;
  out.direction = a.direction;
  out.pessimistic = a.pessimistic && b.pessimistic;
  out.min_loss_index = a.min_loss_index + b.min_loss_index;
  out.infinity_mass =
      a.infinity_mass + b.infinity_mass - a.infinity_mass * b.infinity_mass;

  const bool use_direct =
      std::min(a.pmf.size(), b.pmf.size()) < kDirectConvolutionThreshold;
  out.pmf = use_direct ? internal::ConvolveDirect(a.pmf, b.pmf)
                       : internal::ConvolveFft(a.pmf, b.pmf);
  if (!use_direct) {
    for (double& v : out.pmf) v = std::max(v, 0.0);
  }

  // The discrete convolution conserves mass exactly in exact arithmetic;
  // anything beyond FFT round-off is an internal error.
  const double target = internal::Sum(a.pmf) * internal::Sum(b.pmf);
  const double actual = internal::Sum(out.pmf);
  const double drift = std::abs(actual - target);
  if (drift > 1e-10) {
    throw std::runtime_error("Convolve: convolution mass drifted by " +
                             std::to_string(drift));
  }
  if (actual != target && actual > 0.0) {
    const double scale = target / actual;
    for (double& v : out.pmf) v *= scale;
  }
  return out;
}

namespace internal {

// Retires up to `truncation_mass` from each tail: the upper tail into
// infinity mass, the lower tail onto the smallest surviving point.
inline void TruncateTails(DiscretePld& pld, double truncation_mass) {
  if (truncation_mass <= 0.0 || pld.pmf.size() <= 1) return;

  std::size_t hi = pld.pmf.size();
  double upper = 0.0;
  while (hi > 1 && upper + pld.pmf[hi - 1] <= truncation_mass) {
    upper += pld.pmf[--hi];
  }
  pld.infinity_mass += upper;
  pld.pmf.resize(hi);

  std::size_t lo = 0;
  double lower = 0.0;
  while (lo + 1 < pld.pmf.size() && lower + pld.pmf[lo] <= truncation_mass) {
    lower += pld.pmf[lo++];
  }
  if (lo > 0) {
    pld.pmf.erase(pld.pmf.begin(), pld.pmf.begin() + static_cast<std::ptrdiff_t>(lo));
    pld.pmf.front() += lower;
    pld.min_loss_index += static_cast<std::int64_t>(lo);
  }
}

}  // namespace internal

// num_rounds-fold self-composition by exponentiation by squaring: O(log T)
// convolutions instead of T - 1, which also bounds accumulated truncation.
inline DiscretePld SelfCompose(DiscretePld pld, int num_rounds,
                               double truncation_mass = kDefaultTruncationMass) {
  if (num_rounds <= 0) {
    throw std::invalid_argument("SelfCompose: num_rounds must be positive.");
  }
  if (truncation_mass < 0.0) {
    throw std::invalid_argument("SelfCompose: truncation_mass must be >= 0.");
  }
  DiscretePld result;
  bool have_result = false;
  int remaining = num_rounds;
  while (true) {
    if (remaining & 1) {
      if (have_result) {
        result = Convolve(result, pld);
        internal::TruncateTails(result, truncation_mass);
      } else {
        result = pld;
        have_result = true;
      }
    }
    remaining >>= 1;
    if (remaining == 0) break;
    pld = Convolve(pld, pld);
    internal::TruncateTails(pld, truncation_mass);
  }
  return result;
}

}  // namespace groupdp

#endif  // GROUPDP_COMPOSITION_HPP_
