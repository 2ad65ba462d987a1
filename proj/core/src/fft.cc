// core/src/fft.cc
//
// Copyright 2026  metainit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mi/fft.h"

#include <cmath>

#include "mi/common.h"

namespace mi {

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

FftPlan::FftPlan(int n) : n_(n) {
  Require(IsPowerOfTwo(n) && n >= 2, "FftPlan: size must be a power of two");
  bitrev_.resize(n);
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < log2n; ++b) r |= ((i >> b) & 1) << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (int k = 0; k < n / 2; ++k) {
    double ang = -2.0 * M_PI * k / n;
    twiddle_[k] = {std::cos(ang), std::sin(ang)};
  }
}

void FftPlan::Forward(std::vector<std::complex<double>>* data) const {
  Require(static_cast<int>(data->size()) == n_, "FftPlan: size mismatch");
  auto& a = *data;
  for (int i = 0; i < n_; ++i) {
    int j = bitrev_[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n_; len <<= 1) {
    int half = len >> 1;
    int stride = n_ / len;
    for (int start = 0; start < n_; start += len) {
      for (int k = 0; k < half; ++k) {
        std::complex<double> w = twiddle_[k * stride];
        std::complex<double> u = a[start + k];
        std::complex<double> v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

std::vector<double> FftPlan::PowerSpectrum(
    const std::vector<double>& frame) const {
  std::vector<std::complex<double>> buf(n_, {0.0, 0.0});
  int m = std::min<int>(n_, static_cast<int>(frame.size()));
  for (int i = 0; i < m; ++i) buf[i] = {frame[i], 0.0};
  Forward(&buf);
  std::vector<double> power(n_ / 2 + 1);
  for (int k = 0; k <= n_ / 2; ++k) power[k] = std::norm(buf[k]);
  return power;
}

}  // namespace mi
