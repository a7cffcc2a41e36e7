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

#ifndef GROUPDP_SENSITIVITY_HPP_
#define GROUPDP_SENSITIVITY_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "groupdp/internal/math.hpp"

namespace groupdp {

struct SensitivityEntry {
  double sensitivity = 0.0;
  double probability = 0.0;
};

// A finite distribution over nonnegative scalar sensitivities: the mixture
// centers of a scalar mixture-of-Gaussians mechanism together with their
// weights. Entries are kept sorted by sensitivity, weights sum to one.
class SensitivitySpec {
 public:
  static constexpr double kMassTolerance = 1e-12;

  static SensitivitySpec FromEntries(std::vector<SensitivityEntry> entries) {
    if (entries.empty()) {
      throw std::invalid_argument("SensitivitySpec: no entries.");
    }
    std::sort(entries.begin(), entries.end(),
              [](const SensitivityEntry& a, const SensitivityEntry& b) {
                return a.sensitivity < b.sensitivity;
              });
    internal::NeumaierSum mass;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (!std::isfinite(e.sensitivity) || e.sensitivity < 0.0) {
        throw std::invalid_argument(
            "SensitivitySpec: sensitivities must be finite and nonnegative.");
      }
      if (!std::isfinite(e.probability) || e.probability < 0.0 ||
          e.probability > 1.0) {
        throw std::invalid_argument(
            "SensitivitySpec: probabilities must lie in [0, 1].");
      }
      if (i > 0 && !(entries[i - 1].sensitivity < e.sensitivity)) {
        throw std::invalid_argument(
            "SensitivitySpec: duplicate sensitivity values.");
      }
      mass.Add(e.probability);
    }
    const double total = mass.Total();
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw std::invalid_argument(
          "SensitivitySpec: probabilities sum to " + std::to_string(total) +
          ", expected 1 within 1e-12.");
    }
    // Deviations inside the tolerance are normalized away so downstream CDF
    // arithmetic can treat the total as exactly one.
    if (total != 1.0) {
      for (auto& e : entries) e.probability /= total;
    }
    return SensitivitySpec(std::move(entries));
  }

  const std::vector<SensitivityEntry>& entries() const { return entries_; }

  double Mean() const {
    internal::NeumaierSum s;
    for (const auto& e : entries_) s.Add(e.sensitivity * e.probability);
    return s.Total();
  }

  // Weight placed on sensitivity exactly zero (the mechanism's "not sampled"
  // branch). Bounds the add-direction privacy loss from above by -ln(p0).
  double ZeroMass() const {
    return (entries_.front().sensitivity == 0.0) ? entries_.front().probability
                                                 : 0.0;
  }

  double MaxSensitivity() const { return entries_.back().sensitivity; }

  double MinSensitivity() const { return entries_.front().sensitivity; }

  // True when no positive sensitivity carries mass, i.e. the mechanism pair
  // is a single Gaussian against itself.
  bool AllZero() const {
    for (const auto& e : entries_) {
      if (e.sensitivity > 0.0 && e.probability > 0.0) return false;
    }
    return true;
  }

  // The largest sensitivity that actually carries mass.
  const SensitivityEntry& TopWeightedEntry() const {
    for (std::size_t i = entries_.size(); i-- > 0;) {
      if (entries_[i].probability > 0.0) return entries_[i];
    }
    return entries_.back();
  }

  // Drops entries with probability strictly below `probability_floor`,
  // renormalizes the rest and reports the dropped mass. Callers own the
  // decision of how to account for that mass.
  std::pair<SensitivitySpec, double> TruncateBelow(
      double probability_floor) const {
    std::vector<SensitivityEntry> kept;
    internal::NeumaierSum dropped;
    for (const auto& e : entries_) {
      if (e.probability < probability_floor) {
        dropped.Add(e.probability);
      } else {
        kept.push_back(e);
      }
    }
    if (kept.empty()) {
      throw std::invalid_argument(
          "SensitivitySpec::TruncateBelow: floor removes every entry.");
    }
    const double dropped_mass = dropped.Total();
    const double kept_mass = 1.0 - dropped_mass;
    for (auto& e : kept) e.probability /= kept_mass;
    return {SensitivitySpec(std::move(kept)), dropped_mass};
  }

 private:
  explicit SensitivitySpec(std::vector<SensitivityEntry> entries)
      : entries_(std::move(entries)) {}

  std::vector<SensitivityEntry> entries_;
};

// Sensitivity distribution Binom(group_size, sampling_probability): the
// number of group members that land in a Poisson-sampled batch. PMF evaluated
// in log space so large group sizes and extreme probabilities do not
// underflow.
inline SensitivitySpec BinomialSensitivities(int group_size,
                                             double sampling_probability) {
  if (group_size < 0) {
    throw std::invalid_argument("BinomialSensitivities: group_size < 0.");
  }
  if (!(sampling_probability >= 0.0 && sampling_probability <= 1.0)) {
    throw std::invalid_argument(
        "BinomialSensitivities: sampling probability outside [0, 1].");
  }
  const int k = group_size;
  const double q = sampling_probability;
  if (k == 0 || q == 0.0) {
    return SensitivitySpec::FromEntries({{0.0, 1.0}});
  }
  if (q == 1.0) {
    return SensitivitySpec::FromEntries({{static_cast<double>(k), 1.0}});
  }
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  std::vector<SensitivityEntry> entries(k + 1);
  internal::NeumaierSum mass;
  for (int m = 0; m <= k; ++m) {
    const double log_pmf = internal::LogBinomialCoefficient(k, m) +
                           m * log_q + (k - m) * log_1mq;
    entries[m] = {static_cast<double>(m), std::exp(log_pmf)};
    mass.Add(entries[m].probability);
  }
  const double total = mass.Total();
  if (std::abs(total - 1.0) > SensitivitySpec::kMassTolerance) {
    throw std::runtime_error(
        "BinomialSensitivities: PMF mass drifted beyond 1e-12.");
  }
  for (auto& e : entries) e.probability /= total;
  return SensitivitySpec::FromEntries(std::move(entries));
}

// Sensitivity distribution 2 * Hypergeom(batch_size, dataset_size + k, k):
// twice the number of group members in a fixed-size batch drawn without
// replacement from the dataset plus the group. The doubling reflects that a
// swapped-in example can move the batch gradient sum by up to two gradients.
//
// Log weights come from the exact pmf ratio recurrence
//   w(m+1)/w(m) = (k - m)(B - m) / ((m + 1)(n - B + m + 1)),
// so the binomial-coefficient normalizer cancels; lgamma of population-sized
// arguments would cost ~1e-10 of mass, past the 1e-12 budget.
inline SensitivitySpec HypergeometricSensitivities(int batch_size,
                                                   int dataset_size,
                                                   int group_size) {
  if (group_size < 0) {
    throw std::invalid_argument(
        "HypergeometricSensitivities: group_size < 0.");
  }
  if (batch_size <= 0) {
    throw std::invalid_argument(
        "HypergeometricSensitivities: batch_size must be positive.");
  }
  if (dataset_size < 0 || batch_size > dataset_size + group_size) {
    throw std::invalid_argument(
        "HypergeometricSensitivities: need batch_size <= dataset_size + "
        "group_size.");
  }
  const int b = batch_size, n = dataset_size, k = group_size;
  const int m_lo = std::max(0, b - n);
  const int m_hi = std::min(k, b);
  const int support = m_hi - m_lo + 1;

  std::vector<double> log_weight(support, 0.0);
  for (int m = m_lo; m < m_hi; ++m) {
    const double ratio =
        (static_cast<double>(k - m) * static_cast<double>(b - m)) /
        (static_cast<double>(m + 1) * static_cast<double>(n - b + m + 1));
    log_weight[m - m_lo + 1] = log_weight[m - m_lo] + std::log(ratio);
  }
  double max_log = log_weight[0];
  for (double w : log_weight) max_log = std::max(max_log, w);
  internal::NeumaierSum normalizer;
  for (double w : log_weight) normalizer.Add(std::exp(w - max_log));
  const double log_total = max_log + std::log(normalizer.Total());

  std::vector<SensitivityEntry> entries;
  entries.reserve(support);
  for (int m = m_lo; m <= m_hi; ++m) {
    entries.push_back(
        {2.0 * m, std::exp(log_weight[m - m_lo] - log_total)});
  }
  internal::NeumaierSum mass;
  for (const auto& e : entries) mass.Add(e.probability);
  const double total = mass.Total();
  if (std::abs(total - 1.0) > SensitivitySpec::kMassTolerance) {
    throw std::runtime_error(
        "HypergeometricSensitivities: PMF mass drifted beyond 1e-12.");
  }
  for (auto& e : entries) e.probability /= total;
  return SensitivitySpec::FromEntries(std::move(entries));
}

}  // namespace groupdp

#endif  // GROUPDP_SENSITIVITY_HPP_
