// tests/testutil.h  --  independent oracles shared by the test suites
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

#ifndef MI_TESTS_TESTUTIL_H_
#define MI_TESTS_TESTUTIL_H_

#include <cmath>
#include <vector>

#include "mi/fft.h"
#include "mi/model.h"
#include "mi/wav.h"

namespace mi {
namespace testutil {

// Central finite differences of Loss w.r.t. every parameter. This is the
// independent oracle for the analytic backward pass; it only calls Loss().
inline Gradients NumericGradient(const Objective& objective,
                                 const ParameterSet& params,
                                 const LabeledBatch& batch, double h = 1e-4) {
  Gradients grads = params.ZerosLike();
  auto g_it = grads.begin();
  for (auto p_it = params.begin(); p_it != params.end(); ++p_it, ++g_it) {
    for (int r = 0; r < p_it->second.rows(); ++r) {
      for (int c = 0; c < p_it->second.cols(); ++c) {
        ParameterSet plus = params;
        ParameterSet minus = params;
        plus.At(p_it->first)(r, c) += h;
        minus.At(p_it->first)(r, c) -= h;
        g_it->second(r, c) =
            (objective.Loss(plus, batch) - objective.Loss(minus, batch)) /
            (2.0 * h);
      }
    }
  }
  return grads;
}

// Guarded relative error, torch.gradcheck style: |a-b| / max(|a|+|b|, guard).
inline double RelativeError(double a, double b, double guard = 1e-6) {
  return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), guard);
}

inline double MaxRelativeError(const Gradients& a, const Gradients& b,
                               double guard = 1e-6) {
  double worst = 0.0;
  auto b_it = b.begin();
  for (auto a_it = a.begin(); a_it != a.end(); ++a_it, ++b_it) {
    for (int r = 0; r < a_it->second.rows(); ++r) {
      for (int c = 0; c < a_it->second.cols(); ++c) {
        worst = std::max(
            worst, RelativeError(a_it->second(r, c), b_it->second(r, c),
                                 guard));
      }
    }
  }
  return worst;
}

// Two-parameter linear-softmax model: logits = [w*x, b*x] on scalar inputs.
// Used as the tiny differentiable model for the first-order meta-learning
// oracle; its gradient has a closed form the tests re-derive independently.
class LinearSoftmaxObjective : public Objective {
 public:
  static ParameterSet MakeParams(double w, double b) {
    ParameterSet params;
    params.Insert("b", 1, 1)(0, 0) = b;
    params.Insert("w", 1, 1)(0, 0) = w;
    return params;
  }

  static LabeledBatch MakeBatch(const std::vector<double>& xs,
                                const std::vector<int>& ys) {
    LabeledBatch batch;
    for (size_t i = 0; i < xs.size(); ++i) {
      Eigen::MatrixXd f(1, 1);
      f(0, 0) = xs[i];
      batch.Add(f, {ys[i]});
    }
    return batch;
  }

  double Loss(const ParameterSet& params,
              const LabeledBatch& batch) const override {
    double total = 0.0;
    int64_t frames = 0;
    for (size_t i = 0; i < batch.features.size(); ++i) {
      double x = batch.features[i](0, 0);
      double w = params.At("w")(0, 0), b = params.At("b")(0, 0);
      double l0 = w * x, l1 = b * x;
      double mx = std::max(l0, l1);
      double lse = mx + std::log(std::exp(l0 - mx) + std::exp(l1 - mx));
      total -= (batch.labels[i][0] == 0 ? l0 : l1) - lse;
      ++frames;
    }
    return total / static_cast<double>(frames);
  }

  std::pair<double, Gradients> LossAndGrad(
      const ParameterSet& params, const LabeledBatch& batch) const override {
    Gradients grads = params.ZerosLike();
    double total = 0.0;
    int64_t frames = batch.TotalFrames();
    for (size_t i = 0; i < batch.features.size(); ++i) {
      double x = batch.features[i](0, 0);
      double w = params.At("w")(0, 0), b = params.At("b")(0, 0);
      double l0 = w * x, l1 = b * x;
      double mx = std::max(l0, l1);
      double e0 = std::exp(l0 - mx), e1 = std::exp(l1 - mx);
      double p0 = e0 / (e0 + e1), p1 = e1 / (e0 + e1);
      int y = batch.labels[i][0];
      total -= std::log(y == 0 ? p0 : p1);
      grads.At("w")(0, 0) += (p0 - (y == 0 ? 1.0 : 0.0)) * x / frames;
      grads.At("b")(0, 0) += (p1 - (y == 1 ? 1.0 : 0.0)) * x / frames;
    }
    return {total / static_cast<double>(frames), std::move(grads)};
  }
};

// Dominant frequency of a waveform: mean power spectrum over Hann-windowed
// frames, argmax bin mapped back to Hz.
inline double SpectralPeakHz(const Waveform& wav, int n_fft) {
  FftPlan plan(n_fft);
  std::vector<double> mean_power(n_fft / 2 + 1, 0.0);
  int frames = 0;
  for (int start = 0; start + n_fft <= wav.NumSamples(); start += n_fft / 2) {
    std::vector<double> frame(n_fft);
    for (int i = 0; i < n_fft; ++i) {
      double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (n_fft - 1));
      frame[i] = wav.samples[start + i] * w;
    }
    std::vector<double> power = plan.PowerSpectrum(frame);
    for (size_t k = 0; k < power.size(); ++k) mean_power[k] += power[k];
    ++frames;
  }
  int best = 0;
  for (size_t k = 1; k < mean_power.size(); ++k) {
    if (mean_power[k] > mean_power[best]) best = static_cast<int>(k);
  }
  (void)frames;
  return static_cast<double>(best) * wav.sample_rate / n_fft;
}

inline Waveform MakeSine(double freq_hz, double duration_sec, int sample_rate,
                         double amplitude = 0.5) {
  Waveform wav;
  wav.sample_rate = sample_rate;
  int n = static_cast<int>(std::lround(duration_sec * sample_rate));
  wav.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    wav.samples[i] = amplitude * std::sin(2.0 * M_PI * freq_hz * i / sample_rate);
  }
  return wav;
}

}  // namespace testutil
}  // namespace mi

#endif  // MI_TESTS_TESTUTIL_H_
