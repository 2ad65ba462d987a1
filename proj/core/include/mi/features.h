// mi/features.h  --  log-mel filterbank front end and frame stacking
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

#ifndef MI_FEATURES_H_
#define MI_FEATURES_H_

#include <Eigen/Core>
#include <string>

#include "mi/wav.h"

namespace mi {

// Triangular mel filterbank. Rows are filters over FFT bins 0..n_fft/2.
struct MelFilterbank {
  int n_mels = 80;
  int n_fft = 512;
  int sample_rate = 16000;
  double warp_factor = 1.0;
  Eigen::VectorXd center_freqs;  // Hz, strictly increasing
  Eigen::MatrixXd weights;       // n_mels x (n_fft/2 + 1), nonnegative
};

// Time-major feature matrix; one row per frame.
struct FeatureMatrix {
  Eigen::MatrixXd frames;  // T x D
  int frame_shift_ms = 10;
  int frame_length_ms = 25;

  int NumFrames() const { return static_cast<int>(frames.rows()); }
  int Dim() const { return static_cast<int>(frames.cols()); }
};

double MelScale(double freq_hz);
double InvMelScale(double mel);

// Framing and floor constants. The window is Hamming with pre-emphasis 0.97;
// floor_eps keeps the log finite on silence.
struct FeatureConfig {
  int n_mels = 80;
  int n_fft = 512;
  int sample_rate = 16000;
  int frame_shift_ms = 10;
  int frame_length_ms = 25;
  double preemphasis = 0.97;
  double floor_eps = 1e-10;
  bool mean_normalize = false;  // per-utterance mean subtraction, off by default
  int stack = 1;                // frames appended after each frame

  int InputDim() const { return n_mels * (1 + stack); }
};

// Builds triangular filters tiling [0, sample_rate/2] on the mel scale. With
// warp_factor != 1 every corner frequency is passed through PiecewiseWarp
// (knee at 0.85 * nyquist) before the weights are formed; this is how VTLP
// enters the front end.
MelFilterbank BuildMelFilterbank(int n_mels, int n_fft, int sample_rate,
                                 double warp_factor = 1.0);

// Frame count follows floor((n_samples - frame_length) / frame_shift) + 1.
int NumFrames(int n_samples, int frame_shift, int frame_length);

// Log-mel features: pre-emphasis, Hamming window, power spectrum, filterbank,
// log with floor. Deterministic; throws on NaN input or too-short waveforms.
FeatureMatrix ComputeLogMel(const Waveform& wav, const MelFilterbank& fbank,
                            const FeatureConfig& config);

// Row t becomes the concatenation of rows t .. t+n_append; indices past the
// end repeat the final frame. Output dim is D * (1 + n_append).
FeatureMatrix StackFrames(const FeatureMatrix& features, int n_append = 1);

// Binary feature files: magic "MIFB", version u32, T u32, D u32, then T*D
// little-endian 32-bit floats in row-major order.
void WriteFeatureFile(const std::string& path, const FeatureMatrix& features);
FeatureMatrix ReadFeatureFile(const std::string& path);

}  // namespace mi

#endif  // MI_FEATURES_H_
