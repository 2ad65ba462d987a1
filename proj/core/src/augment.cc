// core/src/augment.cc
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

#include "mi/augment.h"

#include <algorithm>
#include <cmath>

namespace mi {

std::string AugmentMethodName(AugmentMethod method) {
  switch (method) {
    case AugmentMethod::kNone: return "none";
    case AugmentMethod::kSpeedPerturb: return "sp";
    case AugmentMethod::kVtlp: return "vtlp";
    case AugmentMethod::kSpecAug: return "specaug";
  }
  return "none";
}

AugmentMethod ParseAugmentMethod(const std::string& name) {
  if (name == "none") return AugmentMethod::kNone;
  if (name == "sp") return AugmentMethod::kSpeedPerturb;
  if (name == "vtlp") return AugmentMethod::kVtlp;
  if (name == "specaug") return AugmentMethod::kSpecAug;
  throw std::invalid_argument("unknown augmentation method: " + name);
}

double PiecewiseWarp(double freq_hz, double factor, double f_boundary_hz,
                     double nyquist_hz) {
  Require(factor >= kMinWarpFactor && factor <= kMaxWarpFactor,
          "PiecewiseWarp: factor outside [0.5, 2.0]");
  Require(f_boundary_hz > 0.0 && f_boundary_hz < nyquist_hz,
          "PiecewiseWarp: boundary must lie inside (0, nyquist)");
  Require(freq_hz >= 0.0 && freq_hz <= nyquist_hz,
          "PiecewiseWarp: frequency outside [0, nyquist]");
  if (factor == 1.0) return freq_hz;

  // Linear segment factor*f up to the knee, then interpolate so that nyquist
  // maps onto nyquist. For factor > 1 the knee moves down to
  // f_boundary / factor so the warped knee lands exactly at f_boundary.
  double knee = f_boundary_hz / std::max(factor, 1.0);
  if (freq_hz <= knee) return factor * freq_hz;
  double warped_knee = factor * knee;
  double slope = (nyquist_hz - warped_knee) / (nyquist_hz - knee);
  return warped_knee + slope * (freq_hz - knee);
}

namespace {

// Zeroth-order modified Bessel function, power series.
double BesselI0(double x) {
  double sum = 1.0, term = 1.0;
  double half = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

constexpr int kSincHalfWidth = 8;
constexpr double kKaiserBeta = 8.0;

// Windowed-sinc interpolation kernel with anti-alias cutoff `c` (relative to
// Nyquist) and Kaiser window over |t| <= kSincHalfWidth.
double SincKernel(double t, double c, double inv_i0_beta) {
  double at = std::abs(t);
  if (at >= kSincHalfWidth) return 0.0;
  double sinc;
  if (at < 1e-12) {
    sinc = c;
  } else {
    sinc = c * std::sin(M_PI * c * t) / (M_PI * c * t);
  }
  double u = t / kSincHalfWidth;
  double win = BesselI0(kKaiserBeta * std::sqrt(1.0 - u * u)) * inv_i0_beta;
  return sinc * win;
}

}  // namespace

Waveform SpeedPerturb(const Waveform& wav, double factor) {
  Require(factor > 0.0, "SpeedPerturb: factor must be positive");
  Require(factor >= kMinWarpFactor && factor <= kMaxWarpFactor,
          "SpeedPerturb: factor outside [0.5, 2.0]");
  if (factor == 1.0) return wav;

  int n = wav.NumSamples();
  int64_t out_len = std::llround(static_cast<double>(n) / factor);
  Waveform out;
  out.sample_rate = wav.sample_rate;
  out.samples.resize(out_len);

  // Anti-alias low-pass when compressing time (factor > 1).
  double cutoff = std::min(1.0, 1.0 / factor);
  double inv_i0_beta = 1.0 / BesselI0(kKaiserBeta);
  for (int64_t m = 0; m < out_len; ++m) {
    double pos = m * factor;
    int64_t k_lo = static_cast<int64_t>(std::ceil(pos - kSincHalfWidth));
    int64_t k_hi = static_cast<int64_t>(std::floor(pos + kSincHalfWidth));
    double acc = 0.0;
    for (int64_t k = std::max<int64_t>(k_lo, 0);
         k <= std::min<int64_t>(k_hi, n - 1); ++k) {
      acc += wav.samples[k] * SincKernel(pos - k, cutoff, inv_i0_beta);
    }
    out.samples[m] = acc;
  }
  return out;
}

FeatureMatrix SpecAugment(const FeatureMatrix& features, Rng& rng,
                          const SpecAugParams& params) {
  Require(features.NumFrames() >= 1 && features.Dim() >= 1,
          "SpecAugment: empty input");
  Require(params.freq_mask_count >= 0 && params.time_mask_count >= 0 &&
              params.freq_mask_width_max >= 0 && params.time_mask_width_max >= 0,
          "SpecAugment: negative mask parameter");
  FeatureMatrix out = features;
  int t_count = out.NumFrames();
  int d = out.Dim();
  int f_max = std::min(params.freq_mask_width_max, d);
  int t_max = std::min(params.time_mask_width_max, t_count);
  for (int i = 0; i < params.freq_mask_count; ++i) {
    int width = static_cast<int>(RandInt(rng, 0, f_max));
    int start = static_cast<int>(RandInt(rng, 0, d - width));
    if (width > 0) {
      out.frames.middleCols(start, width).setConstant(params.mask_value);
    }
  }
  for (int i = 0; i < params.time_mask_count; ++i) {
    int width = static_cast<int>(RandInt(rng, 0, t_max));
    int start = static_cast<int>(RandInt(rng, 0, t_count - width));
    if (width > 0) {
      out.frames.middleRows(start, width).setConstant(params.mask_value);
    }
  }
  return out;
}

Featurizer::Featurizer(const FeatureConfig& config) : config_(config) {
  Require(config.stack >= 0, "Featurizer: stack must be >= 0");
}

const MelFilterbank& Featurizer::Filterbank(double warp_factor) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = banks_.find(warp_factor);
  if (it == banks_.end()) {
    auto bank = std::make_shared<const MelFilterbank>(BuildMelFilterbank(
        config_.n_mels, config_.n_fft, config_.sample_rate, warp_factor));
    it = banks_.emplace(warp_factor, std::move(bank)).first;
  }
  return *it->second;
}

FeatureMatrix Featurizer::Features(const Waveform& wav) const {
  return Features(wav, AugmentMethod::kNone, 1.0);
}

FeatureMatrix Featurizer::Features(const Waveform& wav, AugmentMethod method,
                                   double factor) const {
  FeatureMatrix logmel;
  switch (method) {
    case AugmentMethod::kNone:
      logmel = ComputeLogMel(wav, Filterbank(1.0), config_);
      break;
    case AugmentMethod::kSpeedPerturb:
      logmel = ComputeLogMel(SpeedPerturb(wav, factor), Filterbank(1.0),
                             config_);
      break;
    case AugmentMethod::kVtlp:
      logmel = ComputeLogMel(wav, Filterbank(factor), config_);
      break;
    case AugmentMethod::kSpecAug:
      throw std::invalid_argument(
          "Featurizer: SpecAug operates on features, not waveforms");
  }
  if (config_.stack > 0) return StackFrames(logmel, config_.stack);
  return logmel;
}

FeatureMatrix ApplyAugment(const Waveform& wav, const AugmentSpec& spec,
                           Rng& rng, const Featurizer& featurizer) {
  (void)rng;  // warping augmentations are deterministic given the factor
  switch (spec.method) {
    case AugmentMethod::kNone:
    case AugmentMethod::kSpeedPerturb:
    case AugmentMethod::kVtlp:
      return featurizer.Features(wav, spec.method, spec.factor);
    case AugmentMethod::kSpecAug:
      throw std::invalid_argument(
          "ApplyAugment: SpecAug requires feature input");
  }
  throw std::invalid_argument("ApplyAugment: unknown method");
}

FeatureMatrix ApplyAugment(const FeatureMatrix& features,
                           const AugmentSpec& spec, Rng& rng) {
  switch (spec.method) {
    case AugmentMethod::kNone:
      return features;
    case AugmentMethod::kSpecAug:
      return SpecAugment(features, rng, spec.spec_params);
    case AugmentMethod::kSpeedPerturb:
    case AugmentMethod::kVtlp:
      throw std::invalid_argument(
          "ApplyAugment: warping methods require waveform input");
  }
  throw std::invalid_argument("ApplyAugment: unknown method");
}

std::shared_ptr<const FeatureMatrix> FeatureCache::Get(
    const std::string& utt_id, AugmentMethod method, double factor,
    const Waveform& wav, const Featurizer& featurizer) {
  // Factor 1.0 is the exact identity for both warping paths, so those
  // requests share the plain entry.
  if (factor == 1.0 || method == AugmentMethod::kNone) {
    method = AugmentMethod::kNone;
    factor = 1.0;
  }
  Key key{utt_id, static_cast<int>(method), factor};
  {
    std::lock_guard<std::mutex> lock(mu_);
    touched_.insert(utt_id);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  // Compute outside the lock; duplicated work on a race is harmless because
  // featurization is deterministic, so both results are identical.
  auto value = std::make_shared<const FeatureMatrix>(
      featurizer.Features(wav, method, factor));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = entries_.emplace(key, value);
  return it->second;
}

std::set<std::string> FeatureCache::TouchedUttIds() const {
  std::lock_guard<std::mutex> lock(mu_);
  return touched_;
}

size_t FeatureCache::NumEntries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

}  // namespace mi
