// mi/augment.h  --  speed perturbation, VTLP and SpecAug
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

#ifndef MI_AUGMENT_H_
#define MI_AUGMENT_H_

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "mi/common.h"
#include "mi/features.h"
#include "mi/wav.h"

namespace mi {

// Admissible warp factors; the canonical set is {0.9, 1.0, 1.1}.
constexpr double kMinWarpFactor = 0.5;
constexpr double kMaxWarpFactor = 2.0;

// Knee of the piecewise-linear frequency warp, as a fraction of Nyquist.
constexpr double kWarpKneeFraction = 0.85;

enum class AugmentMethod { kNone, kSpeedPerturb, kVtlp, kSpecAug };

std::string AugmentMethodName(AugmentMethod method);
AugmentMethod ParseAugmentMethod(const std::string& name);

struct SpecAugParams {
  int freq_mask_width_max = 5;
  int freq_mask_count = 2;
  int time_mask_width_max = 8;
  int time_mask_count = 2;
  double mask_value = 0.0;
};

struct AugmentSpec {
  AugmentMethod method = AugmentMethod::kNone;
  double factor = 1.0;       // warping methods only
  SpecAugParams spec_params;  // SpecAug only
};

// Piecewise-linear warp of [0, nyquist] onto itself: factor * f below the
// knee (placed at f_boundary / max(factor, 1)), then a linear segment that
// pins nyquist to nyquist. Continuous and strictly increasing for every
// factor in range.
double PiecewiseWarp(double freq_hz, double factor, double f_boundary_hz,
                     double nyquist_hz);

// Resamples so playback rate scales by `factor`: output length is
// round(n / factor) and spectral content shifts by `factor`. Windowed-sinc
// interpolation (Kaiser window, 8 taps per side); factor 1.0 is the exact
// identity.
Waveform SpeedPerturb(const Waveform& wav, double factor);

// Masks `freq_mask_count` frequency bands (width uniform on
// [0, freq_mask_width_max]) and `time_mask_count` time bands (width uniform
// on [0, time_mask_width_max]) with params.mask_value. Width maxima are
// clamped to the matrix dimensions; unmasked entries are untouched.
FeatureMatrix SpecAugment(const FeatureMatrix& features, Rng& rng,
                          const SpecAugParams& params);

// Waveform-to-features pipeline with a per-warp-factor filterbank cache.
// VTLP re-featurizes with a warped bank; speed perturbation resamples the
// waveform first. All paths apply the configured frame stacking.
class Featurizer {
 public:
  explicit Featurizer(const FeatureConfig& config);

  const FeatureConfig& config() const { return config_; }

  // Plain (unaugmented) featurization.
  FeatureMatrix Features(const Waveform& wav) const;

  // Featurization under a warping method. kNone ignores `factor`.
  FeatureMatrix Features(const Waveform& wav, AugmentMethod method,
                         double factor) const;

  const MelFilterbank& Filterbank(double warp_factor) const;

 private:
  FeatureConfig config_;
  mutable std::mutex mu_;
  mutable std::map<double, std::shared_ptr<const MelFilterbank>> banks_;
};

// Dispatch on input kind. SpecAug requires features; the warping methods
// require a waveform (VTLP needs the warped filterbank, speed perturbation
// the raw samples). Mismatches throw std::invalid_argument.
FeatureMatrix ApplyAugment(const Waveform& wav, const AugmentSpec& spec,
                           Rng& rng, const Featurizer& featurizer);
FeatureMatrix ApplyAugment(const FeatureMatrix& features,
                           const AugmentSpec& spec, Rng& rng);

// Thread-safe feature store keyed by (utterance, method, factor). Featurizing
// is deterministic, so lookups are bit-identical regardless of which thread
// computed an entry first. Also records which utterances were touched, which
// lets integration tests assert that held-out splits were never featurized by
// a training path.
class FeatureCache {
 public:
  std::shared_ptr<const FeatureMatrix> Get(const std::string& utt_id,
                                           AugmentMethod method, double factor,
                                           const Waveform& wav,
                                           const Featurizer& featurizer);

  std::set<std::string> TouchedUttIds() const;
  size_t NumEntries() const;

 private:
  struct Key {
    std::string utt_id;
    int method;
    double factor;
    bool operator<(const Key& o) const {
      if (utt_id != o.utt_id) return utt_id < o.utt_id;
      if (method != o.method) return method < o.method;
      return factor < o.factor;
    }
  };
  mutable std::mutex mu_;
  std::map<Key, std::shared_ptr<const FeatureMatrix>> entries_;
  std::set<std::string> touched_;
};

}  // namespace mi

#endif  // MI_AUGMENT_H_
