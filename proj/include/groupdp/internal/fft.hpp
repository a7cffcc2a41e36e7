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
// Iterative radix-2 FFT with a real-input half-spectrum wrapper, sized for
// privacy-loss PMFs of a few million points. Roots of unity are tabulated for
// the largest size seen so far; smaller transforms stride through the table.

#ifndef GROUPDP_INTERNAL_FFT_HPP_
#define GROUPDP_INTERNAL_FFT_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace groupdp {
namespace internal {

inline std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Table of exp(-2*pi*i*j/n) for j in [0, n/2). Grows monotonically; entries
// for size n serve every smaller power of two by striding.
class RootTable {
 public:
  void EnsureSize(std::size_t n) {
    if (n <= size_) return;
    const double step = -2.0 * M_PI / static_cast<double>(n);
    roots_.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
      roots_[j] = std::polar(1.0, step * static_cast<double>(j));
    }
    size_ = n;
  }

  std::complex<double> Root(std::size_t n, std::size_t j) const {
    return roots_[j * (size_ / n)];
  }

  std::size_t size() const { return size_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::complex<double>> roots_;
};

inline RootTable& ThreadRootTable() {
  thread_local RootTable table;
  return table;
}

// In-place complex FFT; size must be a power of two. invert=true applies the
// inverse transform including the 1/n scaling.
inline void Fft(std::vector<std::complex<double>>& a, bool invert) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("Fft: size must be a power of two.");
  }
  if (n == 1) return;
  RootTable& table = ThreadRootTable();
  table.EnsureSize(n);

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        std::complex<double> w = table.Root(len, j);
        if (invert) w = std::conj(w);
        const std::complex<double> u = a[start + j];
        const std::complex<double> v = a[start + j + half] * w;
        a[start + j] = u + v;
        a[start + j + half] = u - v;
      }
    }
  }

  if (invert) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& value : a) value *= scale;
  }
}

// Forward transform of a real signal of power-of-two length n (n >= 2),
// computed through a complex FFT of length n/2. Returns bins 0..n/2.
inline std::vector<std::complex<double>> RealFft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  std::vector<std::complex<double>> z(half);
  for (std::size_t j = 0; j < half; ++j) z[j] = {x[2 * j], x[2 * j + 1]};
  Fft(z, /*invert=*/false);

  RootTable& table = ThreadRootTable();
  table.EnsureSize(n);
  std::vector<std::complex<double>> spectrum(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    const std::complex<double> zk = z[k % half];
    const std::complex<double> zr = std::conj(z[(half - k) % half]);
    const std::complex<double> even = 0.5 * (zk + zr);
    const std::complex<double> odd = std::complex<double>(0, -0.5) * (zk - zr);
    const std::complex<double> w =
        (k == half) ? std::complex<double>(-1.0, 0.0) : table.Root(n, k);
    spectrum[k] = even + w * odd;
  }
  return spectrum;
}

// Inverse of RealFft: takes bins 0..n/2 of a conjugate-symmetric spectrum and
// returns the real signal of length n.
inline std::vector<double> RealFftInverse(
    const std::vector<std::complex<double>>& spectrum, std::size_t n) {
  const std::size_t half = n / 2;
  RootTable& table = ThreadRootTable();
  table.EnsureSize(n);
  std::vector<std::complex<double>> z(half);
  for (std::size_t k = 0; k < half; ++k) {
    const std::complex<double> xk = spectrum[k];
    const std::complex<double> xr = std::conj(spectrum[half - k]);
    const std::complex<double> even = 0.5 * (xk + xr);
    const std::complex<double> w = std::conj(table.Root(n, k));
    const std::complex<double> odd = std::complex<double>(0, 1) * 0.5 * w * (xk - xr);
    z[k] = even + odd;
  }
  Fft(z, /*invert=*/true);
  std::vector<double> x(n);
  for (std::size_t j = 0; j < half; ++j) {
    x[2 * j] = z[j].real();
    x[2 * j + 1] = z[j].imag();
  }
  return x;
}

// Linear convolution of two nonnegative real sequences via the real FFT.
inline std::vector<double> ConvolveFft(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  const std::size_t out_size = a.size() + b.size() - 1;
  const std::size_t n = std::max<std::size_t>(4, NextPowerOfTwo(out_size));

  std::vector<double> pa(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::vector<std::complex<double>> fa = RealFft(pa);

  if (&a == &b) {
    for (auto& v : fa) v *= v;
  } else {
    std::vector<double> pb(n, 0.0);
    std::copy(b.begin(), b.end(), pb.begin());
    const std::vector<std::complex<double>> fb = RealFft(pb);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  }

  std::vector<double> c = RealFftInverse(fa, n);
  c.resize(out_size);
  return c;
}

inline std::vector<double> ConvolveDirect(const std::vector<double>& a,
                                          const std::vector<double>& b) {
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += ai * b[j];
  }
  return c;
}

}  // namespace internal
}  // namespace groupdp

#endif  // GROUPDP_INTERNAL_FFT_HPP_
