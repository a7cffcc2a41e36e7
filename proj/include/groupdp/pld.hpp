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
// Privacy loss distributions of scalar mixture-of-Gaussians mechanisms.
//
// A mechanism pair is N(0, sigma^2) against sum_i p_i N(c_i, sigma^2) with
// nonnegative centers c_i. The privacy loss of an output x under the add
// adjacency is
//
//     L(x) = -ln sum_i p_i exp((2 c_i x - c_i^2) / (2 sigma^2)),
//
// strictly decreasing in x whenever some c_i > 0; the remove adjacency swaps
// the pair and negates the loss at the same x. The loss CDF is the Gaussian
// (or mixture) CDF composed with the loss inverse, and is discretized onto a
// uniform grid with ceiling rounding so every approximation can only push
// delta upward.

#ifndef GROUPDP_PLD_HPP_
#define GROUPDP_PLD_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupdp/internal/math.hpp"
#include "groupdp/sensitivity.hpp"

namespace groupdp {

enum class Direction { kAdd, kRemove };

inline const char* ToString(Direction d) {
  return d == Direction::kAdd ? "add" : "remove";
}

// Search cap for epsilon inversions. Beyond this the result is reported as
// infinite rather than searched further.
inline constexpr double kDefaultEpsilonCap = 5000.0;

struct PldDiscretization {
  double grid_spacing = 1e-4;  // loss grid step, in nats
  double tail_mass = 1e-12;    // per-PLD mass allowed past the grid ends
};

// Discretized privacy-loss PMF on the uniform grid {index * grid_spacing}.
// infinity_mass is the probability of unbounded loss and lower-bounds every
// achievable delta. pessimistic means each stored loss value is an upper
// bound on the loss mass it represents.
struct DiscretePld {
  double grid_spacing = 0.0;
  std::int64_t min_loss_index = 0;
  std::vector<double> pmf;
  double infinity_mass = 0.0;
  Direction direction = Direction::kAdd;
  bool pessimistic = true;

  double LossAtIndex(std::size_t i) const {
    return static_cast<double>(min_loss_index + static_cast<std::int64_t>(i)) *
           grid_spacing;
  }

  double TotalMass() const { return internal::Sum(pmf) + infinity_mass; }

  static DiscretePld PointMassAtZero(double grid_spacing, Direction direction) {
    DiscretePld pld;
    pld.grid_spacing = grid_spacing;
    pld.min_loss_index = 0;
    pld.pmf = {1.0};
    pld.infinity_mass = 0.0;
    pld.direction = direction;
    return pld;
  }

  void CheckValid() const {
    if (!(grid_spacing > 0.0)) {
      throw std::invalid_argument("DiscretePld: grid_spacing must be > 0.");
    }
    if (pmf.empty()) {
      throw std::invalid_argument("DiscretePld: empty pmf.");
    }
    for (double v : pmf) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("DiscretePld: pmf entries must be >= 0.");
      }
    }
    if (!(infinity_mass >= 0.0 && infinity_mass <= 1.0)) {
      throw std::invalid_argument("DiscretePld: infinity_mass outside [0, 1].");
    }
    const double mass = TotalMass();
    if (std::abs(mass - 1.0) > 1e-9) {
      throw std::invalid_argument("DiscretePld: total mass " +
                                  std::to_string(mass) +
                                  " deviates from 1 beyond 1e-9.");
    }
  }
};

namespace internal {

// log sum_i p_i exp((2 c_i x - c_i^2) / (2 sigma^2)) and its x-derivative,
// evaluated with the usual max-shift so nothing overflows.
struct MixtureLogRatio {
  double value = 0.0;
  double derivative = 0.0;
};

inline MixtureLogRatio EvalMixtureLogRatio(double x,
                                           const SensitivitySpec& spec,
                                           double sigma) {
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double max_exponent = -kInf;
  for (const auto& e : spec.entries()) {
    if (e.probability <= 0.0) continue;
    const double a = std::log(e.probability) +
                     (2.0 * e.sensitivity * x - e.sensitivity * e.sensitivity) *
                         inv_two_var;
    max_exponent = std::max(max_exponent, a);
  }
  double sum = 0.0;
  double weighted = 0.0;
  for (const auto& e : spec.entries()) {
    if (e.probability <= 0.0) continue;
    const double a = std::log(e.probability) +
                     (2.0 * e.sensitivity * x - e.sensitivity * e.sensitivity) *
                         inv_two_var;
    const double w = std::exp(a - max_exponent);
    sum += w;
    weighted += w * e.sensitivity;
  }
  MixtureLogRatio result;
  result.value = max_exponent + std::log(sum);
  result.derivative = (weighted / sum) / (sigma * sigma);
  return result;
}

}  // namespace internal

// Privacy loss at output x. Total on the reals; add-direction losses are
// bounded above by -ln p0 when the spec puts mass p0 on sensitivity zero.
inline double PrivacyLoss(double x, const SensitivitySpec& spec, double sigma,
                          Direction direction) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("PrivacyLoss: sigma must be positive.");
  }
  const double ratio = internal::EvalMixtureLogRatio(x, spec, sigma).value;
  return direction == Direction::kAdd ? -ratio : ratio;
}

namespace internal {

// Solves add-direction loss(x) = target for the unique x; the loss is
// strictly decreasing. Returns -inf when the target is at or above the
// supremum -ln p0. `hint`, when finite, must satisfy loss(hint) <= target
// and seeds the bracket (used by the grid march in MogPld).
inline double InvertAddLoss(double target, const SensitivitySpec& spec,
                            double sigma,
                            double hint = std::numeric_limits<double>::quiet_NaN()) {
  const double p0 = spec.ZeroMass();
  const double supremum = p0 > 0.0 ? -std::log(p0) : kInf;
  if (target >= supremum) return -kInf;

  const auto loss_at = [&](double x) {
    return -EvalMixtureLogRatio(x, spec, sigma).value;
  };

  // hi side: loss(hi) <= target. A single-component bound gives a closed
  // form: loss(x) <= -ln p_c + (c^2 - 2 c x) / (2 sigma^2) for any component.
  double hi;
  if (std::isfinite(hint)) {
    hi = hint;
  } else {
    const auto& top = spec.TopWeightedEntry();
    const double c = top.sensitivity;
    hi = (c * c + 2.0 * sigma * sigma * (-std::log(top.probability) - target)) /
         (2.0 * c);
    if (loss_at(hi) > target) {
      // The bound guarantees this cannot happen, but guard against rounding.
      double step = std::max(1.0, sigma);
      while (loss_at(hi) > target) hi += step, step *= 2.0;
    }
  }

  // lo side: loss(lo) >= target, found by doubling leftward.
  double lo = hi - std::max(1.0, sigma);
  double step = std::max(1.0, sigma);
  int expansions = 0;
  while (loss_at(lo) < target) {
    step *= 2.0;
    lo -= step;
    if (++expansions > 120) return -kInf;  // target indistinguishable from sup
  }

  // Guarded Newton on f(x) = loss(x) - target with the [lo, hi] bracket.
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    const MixtureLogRatio r = EvalMixtureLogRatio(x, spec, sigma);
    const double f = -r.value - target;
    if (std::abs(f) <= 1e-12) return x;
    if (f > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x + f / r.derivative;  // loss' = -derivative
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace internal

// Inverse of the privacy loss in the given direction, to absolute tolerance
// 1e-12 in the loss. Losses past the attainable range map to -inf, which the
// CDF formulas absorb. Throws for an all-zero spec (constant loss).
inline double InversePrivacyLoss(double loss, const SensitivitySpec& spec,
                                 double sigma, Direction direction) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("InversePrivacyLoss: sigma must be positive.");
  }
  if (spec.AllZero()) {
    throw std::invalid_argument(
        "InversePrivacyLoss: loss is constant for an all-zero spec.");
  }
  const double target = direction == Direction::kAdd ? loss : -loss;
  return internal::InvertAddLoss(target, spec, sigma);
}

namespace internal {

// CDF of the mixture sum_i p_i N(c_i, sigma^2).
inline double MixtureCdf(double x, const SensitivitySpec& spec, double sigma) {
  NeumaierSum s;
  for (const auto& e : spec.entries()) {
    s.Add(e.probability * NormalCdf((x - e.sensitivity) / sigma));
  }
  return s.Total();
}

inline double MixtureUpperTail(double x, const SensitivitySpec& spec,
                               double sigma) {
  NeumaierSum s;
  for (const auto& e : spec.entries()) {
    s.Add(e.probability * NormalTail((x - e.sensitivity) / sigma));
  }
  return s.Total();
}

// Phi(hi) - Phi(lo) without cancellation on either side of the origin.
inline double NormalCdfDiff(double lo, double hi) {
  const double diff = (lo + hi > 0.0) ? NormalTail(lo) - NormalTail(hi)
                                      : NormalCdf(hi) - NormalCdf(lo);
  return std::max(diff, 0.0);
}

}  // namespace internal

// Builds the pessimistic discretized PLD of the scalar MoG mechanism. The
// exact loss CDF is sampled at every grid point; the mass of each cell
// (t - grid, t] is assigned to t (rounding losses up), mass past the upper
// grid end (at most tail_mass) goes to infinity_mass, and mass below the
// lower end is folded into the lowest retained point. The all-zero spec has
// constant loss zero and yields the exact point mass.
inline DiscretePld MogPld(const SensitivitySpec& spec, double sigma,
                          Direction direction,
                          const PldDiscretization& discretization = {}) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("MogPld: sigma must be positive.");
  }
  const double grid = discretization.grid_spacing;
  const double tail = discretization.tail_mass;
  if (!(grid > 0.0)) {
    throw std::invalid_argument("MogPld: grid_spacing must be positive.");
  }
  if (!(tail > 0.0 && tail < 1.0)) {
    throw std::invalid_argument("MogPld: tail_mass must be in (0, 1).");
  }
  if (spec.AllZero()) {
    return DiscretePld::PointMassAtZero(grid, direction);
  }

  const double z_tail = internal::InverseNormalCdf(tail);  // negative
  const double c_min = spec.MinSensitivity();
  const double c_max = spec.MaxSensitivity();

  double t_min, t_max;
  if (direction == Direction::kAdd) {
    // Base measure is N(0, sigma^2); the loss decreases in x, so the upper
    // loss tail is the lower Gaussian tail and vice versa.
    t_max = PrivacyLoss(sigma * z_tail, spec, sigma, direction);
    t_min = PrivacyLoss(-sigma * z_tail, spec, sigma, direction);
  } else {
    // Base measure is the mixture; solve for the x cutting off tail_mass on
    // each side, then map through the (increasing) loss.
    double lo = c_min + sigma * z_tail, hi = c_max - sigma * z_tail;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (internal::MixtureUpperTail(mid, spec, sigma) > tail) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    t_max = PrivacyLoss(0.5 * (lo + hi), spec, sigma, direction);
    lo = c_min + sigma * z_tail, hi = c_max - sigma * z_tail;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (internal::MixtureCdf(mid, spec, sigma) < tail) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    t_min = PrivacyLoss(0.5 * (lo + hi), spec, sigma, direction);
  }

  std::int64_t j_min = static_cast<std::int64_t>(std::floor(t_min / grid));
  std::int64_t j_max = static_cast<std::int64_t>(std::ceil(t_max / grid));
  if (j_max < j_min) j_max = j_min;
  const std::size_t count = static_cast<std::size_t>(j_max - j_min) + 1;

  // March the loss inverse across the grid. Successive roots are adjacent,
  // so each solve is seeded with the previous one.
  std::vector<double> x_at(count);
  const bool add = direction == Direction::kAdd;
  double hint = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < count; ++i) {
    // Add: walk t upward so x decreases and the previous x stays a valid
    // hi-side seed. Remove: walk t downward; in add-loss coordinates the
    // target -t then increases, again keeping the previous x on the hi side.
    const std::int64_t j = add ? j_min + static_cast<std::int64_t>(i)
                               : j_max - static_cast<std::int64_t>(i);
    const double t = static_cast<double>(j) * grid;
    const double x = internal::InvertAddLoss(add ? t : -t, spec, sigma, hint);
    x_at[add ? i : count - 1 - i] = x;
    hint = x;
  }

  DiscretePld pld;
  pld.grid_spacing = grid;
  pld.min_loss_index = j_min;
  pld.direction = direction;
  pld.pmf.assign(count, 0.0);
  if (add) {
    // Pr[L <= t] = 1 - Phi(x_t / sigma): x_at is decreasing.
    pld.pmf[0] = internal::NormalTail(x_at[0] / sigma);
    for (std::size_t i = 1; i < count; ++i) {
      pld.pmf[i] = internal::NormalCdfDiff(x_at[i] / sigma, x_at[i - 1] / sigma);
    }
    pld.infinity_mass = internal::NormalCdf(x_at[count - 1] / sigma);
  } else {
    // Pr[L <= t] = sum_i p_i Phi((x_t - c_i) / sigma): x_at is increasing.
    pld.pmf[0] = internal::MixtureCdf(x_at[0], spec, sigma);
    for (std::size_t i = 1; i < count; ++i) {
      internal::NeumaierSum cell;
      for (const auto& e : spec.entries()) {
        cell.Add(e.probability *
                 internal::NormalCdfDiff((x_at[i - 1] - e.sensitivity) / sigma,
                                         (x_at[i] - e.sensitivity) / sigma));
      }
      pld.pmf[i] = std::max(cell.Total(), 0.0);
    }
    pld.infinity_mass = internal::MixtureUpperTail(x_at[count - 1], spec, sigma);
  }
  pld.CheckValid();
  return pld;
}

// Hockey-stick value of the discretized PLD:
//   delta(epsilon) = infinity_mass + sum_l pmf(l) * max{1 - e^(eps - l), 0}.
// Nonincreasing in epsilon; an upper bound on the true delta because the PLD
// is pessimistic.
inline double GetDeltaForEpsilon(const DiscretePld& pld, double epsilon) {
  internal::NeumaierSum sum;
  sum.Add(pld.infinity_mass);
  for (std::size_t i = pld.pmf.size(); i-- > 0;) {
    const double loss = pld.LossAtIndex(i);
    if (loss <= epsilon) break;  // losses decrease from here on
    sum.Add(pld.pmf[i] * -std::expm1(epsilon - loss));
  }
  const double delta = sum.Total();
  return std::clamp(delta, 0.0, 1.0);
}

// Precomputed suffix sums for repeated delta(epsilon) queries on one PLD.
// Only valid for epsilon >= 0. Matches GetDeltaForEpsilon to ~1e-14.
class DeltaCurve {
 public:
  explicit DeltaCurve(const DiscretePld& pld)
      : grid_(pld.grid_spacing),
        min_index_(pld.min_loss_index),
        infinity_mass_(pld.infinity_mass),
        size_(pld.pmf.size()) {
    suffix_mass_.resize(size_ + 1, 0.0);
    log_suffix_weight_.resize(size_ + 1, -internal::kInf);
    long double mass = 0.0L;
    long double weight = 0.0L;  // sum of pmf * e^{-loss}; loss >= 0 region only
    for (std::size_t i = size_; i-- > 0;) {
      const double loss = static_cast<double>(min_index_ + static_cast<std::int64_t>(i)) * grid_;
      mass += pld.pmf[i];
      if (loss >= 0.0) {
        weight += static_cast<long double>(pld.pmf[i]) *
                  std::exp(static_cast<long double>(-loss));
      }
      suffix_mass_[i] = static_cast<double>(mass);
      log_suffix_weight_[i] =
          weight > 0.0L ? static_cast<double>(std::log(weight)) : -internal::kInf;
    }
  }

  double infinity_mass() const { return infinity_mass_; }

  double DeltaForEpsilon(double epsilon) const {
    if (!(epsilon >= 0.0)) {
      throw std::invalid_argument("DeltaCurve: epsilon must be >= 0.");
    }
    // First index with loss > epsilon.
    const double pos = epsilon / grid_ - static_cast<double>(min_index_);
    std::int64_t j = static_cast<std::int64_t>(std::floor(pos)) + 1;
    j = std::clamp<std::int64_t>(j, 0, static_cast<std::int64_t>(size_));
    while (j > 0 && LossAt(j - 1) > epsilon) --j;
    while (j < static_cast<std::int64_t>(size_) && LossAt(j) <= epsilon) ++j;
    const std::size_t start = static_cast<std::size_t>(j);
    const double positive_part =
        suffix_mass_[start] -
        std::exp(epsilon + log_suffix_weight_[start]);
    return std::clamp(infinity_mass_ + std::max(positive_part, 0.0), 0.0, 1.0);
  }

 private:
  double LossAt(std::int64_t j) const {
    return static_cast<double>(min_index_ + j) * grid_;
  }

  double grid_;
  std::int64_t min_index_;
  double infinity_mass_;
  std::size_t size_;
  std::vector<double> suffix_mass_;
  std::vector<double> log_suffix_weight_;
};

// Minimum epsilon in [0, epsilon_cap] with delta(epsilon) <= delta, to
// absolute tolerance 1e-9. Returns +inf when delta <= infinity_mass (no
// finite epsilon exists) or when even epsilon_cap cannot reach delta.
inline double GetEpsilonForDelta(const DiscretePld& pld, double delta,
                                 double epsilon_cap = kDefaultEpsilonCap) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("GetEpsilonForDelta: delta must be in (0, 1).");
  }
  if (delta <= pld.infinity_mass) return internal::kInf;
  const DeltaCurve curve(pld);
  if (curve.DeltaForEpsilon(0.0) <= delta) return 0.0;
  if (curve.DeltaForEpsilon(epsilon_cap) > delta) return internal::kInf;
  double lo = 0.0, hi = epsilon_cap;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (curve.DeltaForEpsilon(mid) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace groupdp

#endif  // GROUPDP_PLD_HPP_
