// mi/fft.h  --  radix-2 FFT for power-of-two sizes
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

#ifndef MI_FFT_H_
#define MI_FFT_H_

#include <complex>
#include <vector>

namespace mi {

// Iterative Cooley-Tukey plan with precomputed twiddles. One plan serves many
// transforms of the same size; Forward() is const and thread-safe.
class FftPlan {
 public:
  explicit FftPlan(int n);  // n must be a power of two >= 2

  int Size() const { return n_; }

  // In-place DFT of `data` (size n).
  void Forward(std::vector<std::complex<double>>* data) const;

  // Power spectrum |X_k|^2 for k = 0..n/2 of a real signal; `frame` is
  // zero-padded or truncated to n.
  std::vector<double> PowerSpectrum(const std::vector<double>& frame) const;

 private:
  int n_;
  std::vector<int> bitrev_;
  std::vector<std::complex<double>> twiddle_;
};

bool IsPowerOfTwo(int n);

}  // namespace mi

#endif  // MI_FFT_H_
