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

#ifndef GROUPDP_INTERNAL_MATH_HPP_
#define GROUPDP_INTERNAL_MATH_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace groupdp {
namespace internal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard normal CDF. erfc keeps full relative accuracy in the lower tail.
inline double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P[N(0,1) > x], accurate in the upper tail.
inline double NormalTail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Standard normal density.
inline double NormalPdf(double x) {
  static const double kInvSqrt2Pi = 0.3989422804014327;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// Quantile of the standard normal via bisection on NormalCdf. Only used a
// handful of times per PLD construction, so speed is irrelevant.
inline double InverseNormalCdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("InverseNormalCdf: p must be in (0, 1).");
  }
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (NormalCdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Kahan-Neumaier compensated summation. Long PMF reductions feed differences
// of values spanning ~300 orders of magnitude.
class NeumaierSum {
 public:
  void Add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double Total() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double Sum(std::span<const double> values) {
  NeumaierSum s;
  for (double v : values) s.Add(v);
  return s.Total();
}

// log(C(n, k)) through lgamma; exact enough for n in the thousands.
inline double LogBinomialCoefficient(int64_t n, int64_t k) {
  if (k < 0 || k > n) return -kInf;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace internal
}  // namespace groupdp

#endif  // GROUPDP_INTERNAL_MATH_HPP_
