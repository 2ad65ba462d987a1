// core/src/features.cc
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

#include "mi/features.h"

#include <cmath>
#include <fstream>

#include "mi/augment.h"
#include "mi/common.h"
#include "mi/fft.h"

namespace mi {

double MelScale(double freq_hz) {
  return 2595.0 * std::log10(1.0 + freq_hz / 700.0);
}

double InvMelScale(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank BuildMelFilterbank(int n_mels, int n_fft, int sample_rate,
                                 double warp_factor) {
  Require(n_mels >= 1, "BuildMelFilterbank: n_mels must be >= 1");
  Require(IsPowerOfTwo(n_fft) && n_fft >= 64,
          "BuildMelFilterbank: n_fft must be a power of two >= 64");
  Require(sample_rate > 0, "BuildMelFilterbank: sample_rate must be positive");
  Require(warp_factor >= kMinWarpFactor && warp_factor <= kMaxWarpFactor,
          "BuildMelFilterbank: warp_factor outside [0.5, 2.0]");
  int bins = n_fft / 2 + 1;
  Require(n_mels + 2 <= bins,
          "BuildMelFilterbank: n_mels exceeds FFT bin count");

  double nyquist = sample_rate / 2.0;
  double mel_max = MelScale(nyquist);

  // Corner frequencies: n_mels + 2 points equally spaced on the mel scale,
  // warped afterwards so filter 1.0 banks stay bit-identical to the unwarped
  // construction.
  std::vector<double> corners(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    // the mel->Hz round trip can land a rounding error above nyquist
    double f = std::min(InvMelScale(mel_max * i / (n_mels + 1)), nyquist);
    if (warp_factor != 1.0) {
      f = PiecewiseWarp(f, warp_factor, kWarpKneeFraction * nyquist, nyquist);
    }
    corners[i] = f;
  }

  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_fft = n_fft;
  fb.sample_rate = sample_rate;
  fb.warp_factor = warp_factor;
  fb.center_freqs.resize(n_mels);
  fb.weights = Eigen::MatrixXd::Zero(n_mels, bins);

  double bin_hz = static_cast<double>(sample_rate) / n_fft;
  for (int m = 0; m < n_mels; ++m) {
    double left = corners[m], center = corners[m + 1], right = corners[m + 2];
    fb.center_freqs(m) = center;
    for (int k = 0; k < bins; ++k) {
      double f = k * bin_hz;
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f == center) {
        w = 1.0;
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      fb.weights(m, k) = w;
    }
  }
  return fb;
}

int NumFrames(int n_samples, int frame_shift, int frame_length) {
  Require(frame_shift > 0 && frame_length > 0, "NumFrames: bad framing");
  if (n_samples < frame_length) return 0;
  return (n_samples - frame_length) / frame_shift + 1;
}

FeatureMatrix ComputeLogMel(const Waveform& wav, const MelFilterbank& fbank,
                            const FeatureConfig& config) {
  Require(wav.sample_rate == fbank.sample_rate,
          "ComputeLogMel: waveform/filterbank sample rate mismatch");
  int frame_length = wav.sample_rate * config.frame_length_ms / 1000;
  int frame_shift = wav.sample_rate * config.frame_shift_ms / 1000;
  Require(frame_length <= fbank.n_fft,
          "ComputeLogMel: frame longer than FFT size");
  int n = wav.NumSamples();
  if (n < frame_length)
    throw std::invalid_argument("ComputeLogMel: waveform too short");
  for (double s : wav.samples) {
    if (!std::isfinite(s))
      throw std::invalid_argument("ComputeLogMel: non-finite sample");
  }

  // Pre-emphasis over the whole signal; first sample follows the x[-1]=x[0]
  // convention.
  std::vector<double> emph(n);
  emph[0] = wav.samples[0] - config.preemphasis * wav.samples[0];
  for (int t = 1; t < n; ++t) {
    emph[t] = wav.samples[t] - config.preemphasis * wav.samples[t - 1];
  }

  std::vector<double> window(frame_length);
  for (int i = 0; i < frame_length; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (frame_length - 1));
  }

  int num_frames = NumFrames(n, frame_shift, frame_length);
  FftPlan plan(fbank.n_fft);

  FeatureMatrix out;
  out.frame_shift_ms = config.frame_shift_ms;
  out.frame_length_ms = config.frame_length_ms;
  out.frames.resize(num_frames, fbank.n_mels);

  std::vector<double> frame(frame_length);
  for (int t = 0; t < num_frames; ++t) {
    int start = t * frame_shift;
    for (int i = 0; i < frame_length; ++i) {
      frame[i] = emph[start + i] * window[i];
    }
    std::vector<double> power = plan.PowerSpectrum(frame);
    Eigen::Map<const Eigen::VectorXd> p(power.data(),
                                        static_cast<int>(power.size()));
    out.frames.row(t) =
        ((fbank.weights * p).array() + config.floor_eps).log().transpose();
  }

  if (config.mean_normalize) {
    Eigen::RowVectorXd mean = out.frames.colwise().mean();
    out.frames.rowwise() -= mean;
  }
  return out;
}

FeatureMatrix StackFrames(const FeatureMatrix& features, int n_append) {
  Require(n_append >= 0, "StackFrames: n_append must be >= 0");
  Require(features.NumFrames() >= 1, "StackFrames: empty input");
  int t_count = features.NumFrames();
  int d = features.Dim();
  FeatureMatrix out;
  out.frame_shift_ms = features.frame_shift_ms;
  out.frame_length_ms = features.frame_length_ms;
  out.frames.resize(t_count, d * (1 + n_append));
  for (int t = 0; t < t_count; ++t) {
    for (int a = 0; a <= n_append; ++a) {
      int src = std::min(t + a, t_count - 1);  // repeat final frame at the end
      out.frames.block(t, a * d, 1, d) = features.frames.row(src);
    }
  }
  return out;
}

namespace {
constexpr uint32_t kFeatureMagic = 0x4246494d;  // "MIFB" little-endian
constexpr uint32_t kFeatureVersion = 1;
}  // namespace

void WriteFeatureFile(const std::string& path, const FeatureMatrix& features) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("WriteFeatureFile: cannot open " + path);
  WriteU32(os, kFeatureMagic);
  WriteU32(os, kFeatureVersion);
  WriteU32(os, static_cast<uint32_t>(features.NumFrames()));
  WriteU32(os, static_cast<uint32_t>(features.Dim()));
  for (int t = 0; t < features.NumFrames(); ++t) {
    for (int j = 0; j < features.Dim(); ++j) {
      WriteF32(os, static_cast<float>(features.frames(t, j)));
    }
  }
  if (!os) throw std::runtime_error("WriteFeatureFile: write failed " + path);
}

FeatureMatrix ReadFeatureFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("ReadFeatureFile: cannot open " + path);
  if (ReadU32(is) != kFeatureMagic)
    throw std::runtime_error("ReadFeatureFile: bad magic in " + path);
  uint32_t version = ReadU32(is);
  if (version != kFeatureVersion)
    throw std::runtime_error("ReadFeatureFile: unsupported version");
  uint32_t t_count = ReadU32(is);
  uint32_t d = ReadU32(is);
  FeatureMatrix out;
  out.frames.resize(t_count, d);
  for (uint32_t t = 0; t < t_count; ++t) {
    for (uint32_t j = 0; j < d; ++j) {
      out.frames(t, j) = static_cast<double>(ReadF32(is));
    }
  }
  return out;
}

}  // namespace mi
