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
// Brute-force validators for the accountant: hockey-stick divergences by
// adaptive quadrature in output space, small-T composition on a fine
// midpoint-rounded loss grid, and a Monte-Carlo simulation of the worst-case
// DP-SGD instances whose per-round increments are exactly the dominating
// mixture-of-Gaussians pair.

#ifndef GROUPDP_ORACLE_HPP_
#define GROUPDP_ORACLE_HPP_

#include <cmath>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <thread>
#include <vector>

#include "groupdp/accountant.hpp"
#include "groupdp/internal/fft.hpp"
#include "groupdp/internal/math.hpp"
#include "groupdp/pld.hpp"
#include "groupdp/sensitivity.hpp"

namespace groupdp {
namespace internal {

inline double MixturePdf(double x, const SensitivitySpec& spec, double sigma) {
  NeumaierSum s;
  for (const auto& e : spec.entries()) {
    s.Add(e.probability * NormalPdf((x - e.sensitivity) / sigma) / sigma);
  }
  return s.Total();
}

template <typename F>
double AdaptiveSimpsonStep(const F& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol,
                           int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double split = left + right;
  if (depth <= 0 || std::abs(split - whole) <= 15.0 * tol) {
    return split + (split - whole) / 15.0;
  }
  return AdaptiveSimpsonStep(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         AdaptiveSimpsonStep(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double AdaptiveSimpson(const F& f, double a, double b, double tol) {
  // Seed with a fixed panel split so narrow features cannot hide from the
  // first Simpson estimate.
  constexpr int kPanels = 64;
  const double step = (b - a) / kPanels;
  NeumaierSum total;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * step;
    const double hi = (i + 1 == kPanels) ? b : a + (i + 1) * step;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total.Add(AdaptiveSimpsonStep(f, lo, hi, flo, fmid, fhi, whole,
                                  tol / kPanels, 48));
  }
  return total.Total();
}

}  // namespace internal

// Hockey-stick divergence between the one-dimensional Gaussian mixtures named
// by the two specs with common sigma:
//   H_alpha(P, Q) = integral of max{P(x) - alpha * Q(x), 0} dx
// by adaptive Simpson quadrature over [min_c - 12 sigma, max_c + 12 sigma].
inline double HockeyStickQuadrature(const SensitivitySpec& p_spec,
                                    const SensitivitySpec& q_spec, double sigma,
                                    double alpha, double tolerance = 1e-10) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("HockeyStickQuadrature: sigma must be > 0.");
  }
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("HockeyStickQuadrature: alpha must be >= 0.");
  }
  const double lo =
      std::min(p_spec.MinSensitivity(), q_spec.MinSensitivity()) - 12.0 * sigma;
  const double hi =
      std::max(p_spec.MaxSensitivity(), q_spec.MaxSensitivity()) + 12.0 * sigma;
  const auto integrand = [&](double x) {
    const double diff = internal::MixturePdf(x, p_spec, sigma) -
                        alpha * internal::MixturePdf(x, q_spec, sigma);
    return diff > 0.0 ? diff : 0.0;
  };
  const double value = internal::AdaptiveSimpson(integrand, lo, hi, tolerance);
  return std::clamp(value, 0.0, 1.0);
}

// delta(epsilon) of the rounds-fold composed MoG mechanism, computed on a
// fine midpoint-rounded loss grid with no pessimistic rounding: the result
// converges to the exact value from either side as the spacing shrinks and
// stays below the accountant's ceiling-rounded delta. Loss mass past the
// grid ends (about 1e-14 per side and per round) is dropped.
inline double ComposeOracle(const SensitivitySpec& spec, double sigma,
                            int rounds, double epsilon, Direction direction,
                            double fine_spacing = 5e-6) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("ComposeOracle: sigma must be > 0.");
  }
  if (rounds < 1 || rounds > 3) {
    throw std::invalid_argument(
        "ComposeOracle: rounds must be 1, 2 or 3 (cost grows as a dense grid "
        "product).");
  }
  if (!(fine_spacing > 0.0)) {
    throw std::invalid_argument("ComposeOracle: spacing must be > 0.");
  }
  if (spec.AllZero()) {
    return epsilon >= 0.0 ? 0.0 : -std::expm1(epsilon);
  }

  constexpr double kEdgeMass = 1e-14;
  const double h = fine_spacing;
  const double z_tail = internal::InverseNormalCdf(kEdgeMass);
  const bool add = direction == Direction::kAdd;

  double t_lo, t_hi;
  if (add) {
    t_hi = PrivacyLoss(sigma * z_tail, spec, sigma, direction);
    t_lo = PrivacyLoss(-sigma * z_tail, spec, sigma, direction);
  } else {
    const double c_min = spec.MinSensitivity(), c_max = spec.MaxSensitivity();
    double lo = c_min + sigma * z_tail, hi = c_max - sigma * z_tail;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (internal::MixtureUpperTail(mid, spec, sigma) > kEdgeMass ? lo : hi) = mid;
    }
    t_hi = PrivacyLoss(hi, spec, sigma, direction);
    lo = c_min + sigma * z_tail, hi = c_max - sigma * z_tail;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (internal::MixtureCdf(mid, spec, sigma) < kEdgeMass ? lo : hi) = mid;
    }
    t_lo = PrivacyLoss(lo, spec, sigma, direction);
  }

  const std::int64_t j_lo = static_cast<std::int64_t>(std::floor(t_lo / h));
  const std::int64_t j_hi =
      std::max(static_cast<std::int64_t>(std::ceil(t_hi / h)), j_lo);
  const std::size_t cells = static_cast<std::size_t>(j_hi - j_lo) + 1;

  // Loss mass of cell j is taken between the edges (j -/+ 1/2) h and sits at
  // the center j*h. Edges are inverted with a marching seed as in MogPld.
  std::vector<double> edge_x(cells + 1);
  double hint = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i <= cells; ++i) {
    const std::int64_t j = add ? j_lo + static_cast<std::int64_t>(i)
                               : j_hi + 1 - static_cast<std::int64_t>(i);
    const double edge = (static_cast<double>(j) - 0.5) * h;
    const double x = internal::InvertAddLoss(add ? edge : -edge, spec, sigma, hint);
    edge_x[add ? i : cells - i] = x;
    hint = x;
  }

  std::vector<double> pmf(cells);
  if (add) {
    for (std::size_t i = 0; i < cells; ++i) {
      pmf[i] = internal::NormalCdfDiff(edge_x[i + 1] / sigma, edge_x[i] / sigma);
    }
  } else {
    for (std::size_t i = 0; i < cells; ++i) {
      internal::NeumaierSum cell;
      for (const auto& e : spec.entries()) {
        cell.Add(e.probability *
                 internal::NormalCdfDiff((edge_x[i] - e.sensitivity) / sigma,
                                         (edge_x[i + 1] - e.sensitivity) / sigma));
      }
      pmf[i] = std::max(cell.Total(), 0.0);
    }
  }

  std::vector<double> composed = pmf;
  for (int r = 1; r < rounds; ++r) {
    composed = (std::min(composed.size(), pmf.size()) < 1024)
                   ? internal::ConvolveDirect(composed, pmf)
                   : internal::ConvolveFft(composed, pmf);
    for (double& v : composed) v = std::max(v, 0.0);
  }

  const std::int64_t base_index = static_cast<std::int64_t>(rounds) * j_lo;
  internal::NeumaierSum delta;
  for (std::size_t i = composed.size(); i-- > 0;) {
    const double loss =
        static_cast<double>(base_index + static_cast<std::int64_t>(i)) * h;
    if (loss <= epsilon) break;
    delta.Add(composed[i] * -std::expm1(epsilon - loss));
  }
  return std::clamp(delta.Total(), 0.0, 1.0);
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

namespace internal {

inline std::uint64_t SplitMix64Next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// One standard normal draw from two 53-bit uniforms (Box-Muller). Each draw
// consumes a fixed number of stream words, keeping sample streams aligned.
inline double NormalDraw(std::uint64_t& state) {
  const double u1 =
      (static_cast<double>(SplitMix64Next(state) >> 11) + 1.0) * 0x1p-53;
  const double u2 = static_cast<double>(SplitMix64Next(state) >> 11) * 0x1p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace internal

// Monte-Carlo estimate of the add-direction hockey-stick divergence
// H_{e^eps} between the T-round released increments of the worst-case
// one-dimensional DP-SGD instance on adjacent datasets. For the worst-case
// losses the (shifted) increments are exactly N(0, sigma^2) per round under
// D and the dominating mixture under D', so the likelihood ratio is available
// in closed form and the estimator is unbiased importance weighting under the
// D run. Deterministic given the seed: every sample derives its own counter
// stream and shards combine in fixed order regardless of thread count.
inline MonteCarloEstimate SimulateTightness(int group_size,
                                            const SamplingScheme& scheme,
                                            double sigma, int rounds,
                                            double epsilon,
                                            std::int64_t samples,
                                            std::uint64_t seed) {
  if (group_size < 1) {
    throw std::invalid_argument("SimulateTightness: group_size must be >= 1.");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("SimulateTightness: sigma must be > 0.");
  }
  if (rounds < 1) {
    throw std::invalid_argument("SimulateTightness: rounds must be >= 1.");
  }
  if (samples < 2) {
    throw std::invalid_argument("SimulateTightness: need at least 2 samples.");
  }
  if (static_cast<double>(samples) * rounds > 1e8) {
    throw std::invalid_argument(
        "SimulateTightness: samples * rounds beyond 1e8 draws.");
  }
  AccountantConfig probe;  // reuse its scheme validation and spec choice
  probe.sigma = sigma;
  probe.rounds = rounds;
  probe.group_size = group_size;
  probe.scheme = scheme;
  const SensitivitySpec spec = DominatingSpec(probe);

  constexpr int kNumShards = 64;
  struct ShardTotals {
    double sum = 0.0;
    double sum_squares = 0.0;
  };
  std::vector<ShardTotals> totals(kNumShards);

  const auto run_shard = [&](int shard) {
    const std::int64_t begin = samples * shard / kNumShards;
    const std::int64_t end = samples * (shard + 1) / kNumShards;
    internal::NeumaierSum sum, sum_squares;
    for (std::int64_t i = begin; i < end; ++i) {
      std::uint64_t state =
          seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1);
      double log_ratio = 0.0;
      for (int r = 0; r < rounds; ++r) {
        const double y = sigma * internal::NormalDraw(state);
        log_ratio += internal::EvalMixtureLogRatio(y, spec, sigma).value;
      }
      const double exponent = epsilon + log_ratio;
      const double v = exponent >= 0.0 ? 0.0 : -std::expm1(exponent);
      sum.Add(v);
      sum_squares.Add(v * v);
    }
    totals[shard] = {sum.Total(), sum_squares.Total()};
  };

  const unsigned workers = std::max(
      1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::future<void>> pending;
  for (unsigned w = 0; w < workers; ++w) {
    pending.push_back(std::async(std::launch::async, [&, w] {
      for (int shard = static_cast<int>(w); shard < kNumShards;
           shard += static_cast<int>(workers)) {
        run_shard(shard);
      }
    }));
  }
  for (auto& f : pending) f.get();

  internal::NeumaierSum sum, sum_squares;
  for (const auto& t : totals) {
    sum.Add(t.sum);
    sum_squares.Add(t.sum_squares);
  }
  const double n = static_cast<double>(samples);
  MonteCarloEstimate result;
  result.estimate = sum.Total() / n;
  const double variance = std::max(
      0.0, (sum_squares.Total() - n * result.estimate * result.estimate) /
               (n - 1.0));
  result.std_error = std::sqrt(variance / n);
  return result;
}

}  // namespace groupdp

#endif  // GROUPDP_ORACLE_HPP_
