// tests/augment_test.cc
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

#include <doctest.h>

#include <cmath>

#include "mi/common.h"
#include "testutil.h"

using namespace mi;

TEST_SUITE_BEGIN("augment");

TEST_CASE("piecewise warp: DC and Nyquist are fixed points") {
  for (double factor : {0.9, 1.0, 1.1}) {
    CHECK(PiecewiseWarp(0.0, factor, 6800.0, 8000.0) == 0.0);
    CHECK(PiecewiseWarp(8000.0, factor, 6800.0, 8000.0) ==
          doctest::Approx(8000.0).epsilon(1e-12));
  }
}

TEST_CASE("piecewise warp: below the knee the map is factor * f") {
  // Independent evaluation of the below-knee segment.
  CHECK(PiecewiseWarp(1000.0, 1.1, 6800.0, 8000.0) == 1.1 * 1000.0);
  CHECK(PiecewiseWarp(2000.0, 0.9, 6800.0, 8000.0) == 0.9 * 2000.0);
}

TEST_CASE("piecewise warp: strictly increasing bijection on a 1 Hz grid") {
  for (double factor : {0.9, 1.1}) {
    double prev = PiecewiseWarp(0.0, factor, 6800.0, 8000.0);
    double max_step = 0.0;
    for (int f = 1; f <= 8000; ++f) {
      double w = PiecewiseWarp(static_cast<double>(f), factor, 6800.0, 8000.0);
      CHECK(w > prev);               // strictly increasing
      CHECK(w >= 0.0);
      CHECK(w <= 8000.0 + 1e-9);     // into [0, nyquist]
      max_step = std::max(max_step, w - prev);
      prev = w;
    }
    CHECK(prev == doctest::Approx(8000.0).epsilon(1e-12));  // onto
    CHECK(max_step < 2.0);  // no jumps: continuous on the grid scale
  }
}

TEST_CASE("piecewise warp: rejects out-of-range factors") {
  CHECK_THROWS_AS(PiecewiseWarp(100.0, 0.4, 6800.0, 8000.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseWarp(100.0, 2.1, 6800.0, 8000.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseWarp(9000.0, 1.1, 6800.0, 8000.0),
                  std::invalid_argument);
}

TEST_CASE("speed perturb: factor 1.0 is the exact identity") {
  Waveform wav = testutil::MakeSine(440.0, 0.5, 16000);
  Waveform out = SpeedPerturb(wav, 1.0);
  CHECK(out.samples == wav.samples);
}

TEST_CASE("speed perturb: output length is round(n / factor)") {
  Waveform wav;
  wav.sample_rate = 16000;
  wav.samples.assign(16000, 0.0);
  CHECK(std::abs(SpeedPerturb(wav, 0.9).NumSamples() - 17778) <= 1);
  CHECK(std::abs(SpeedPerturb(wav, 1.1).NumSamples() -
                 static_cast<int>(std::lround(16000 / 1.1))) <= 1);

  Rng rng(MixSeed(5));
  for (int trial = 0; trial < 20; ++trial) {
    int n = static_cast<int>(RandInt(rng, 1000, 30000));
    double factor = RandRange(rng, 0.6, 1.8);
    wav.samples.assign(n, 0.0);
    int expect = static_cast<int>(std::lround(n / factor));
    CHECK(std::abs(SpeedPerturb(wav, factor).NumSamples() - expect) <= 1);
  }
}

TEST_CASE("speed perturb: 440 Hz tone becomes 484 Hz under factor 1.1") {
  Waveform wav = testutil::MakeSine(440.0, 1.0, 16000);
  Waveform fast = SpeedPerturb(wav, 1.1);
  int n_fft = 8192;  // shorter than the 14545-sample output
  double peak = testutil::SpectralPeakHz(fast, n_fft);
  double bin_hz = 16000.0 / n_fft;
  CHECK(std::abs(peak - 484.0) <= bin_hz + 1e-9);
}

TEST_CASE("speed perturb: factor and its inverse compose to near identity") {
  // Bandlimited input: sum of tones well below Nyquist.
  Waveform wav;
  wav.sample_rate = 16000;
  wav.samples.resize(16000);
  for (int i = 0; i < 16000; ++i) {
    double t = static_cast<double>(i);
    wav.samples[i] = 0.3 * std::sin(2 * M_PI * 440 * t / 16000) +
                     0.2 * std::sin(2 * M_PI * 1200 * t / 16000) +
                     0.1 * std::sin(2 * M_PI * 2500 * t / 16000);
  }
  Waveform back = SpeedPerturb(SpeedPerturb(wav, 0.9), 1.0 / 0.9);
  int n = std::min(wav.NumSamples(), back.NumSamples());
  // skip kernel-width edges
  int skip = 32;
  double num = 0.0, den = 0.0;
  for (int i = skip; i < n - skip; ++i) {
    double d = wav.samples[i] - back.samples[i];
    num += d * d;
    den += wav.samples[i] * wav.samples[i];
  }
  CHECK(std::sqrt(num / den) < 0.05);
}

TEST_CASE("speed perturb: rejects nonpositive and out-of-range factors") {
  Waveform wav = testutil::MakeSine(440.0, 0.1, 16000);
  CHECK_THROWS_AS(SpeedPerturb(wav, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpeedPerturb(wav, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(SpeedPerturb(wav, 3.0), std::invalid_argument);
}

TEST_CASE("specaug: zero max widths leave the input untouched") {
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(50, 40);
  SpecAugParams params;
  params.freq_mask_width_max = 0;
  params.time_mask_width_max = 0;
  Rng rng(MixSeed(1));
  FeatureMatrix out = SpecAugment(feats, rng, params);
  CHECK(out.frames == feats.frames);
}

TEST_CASE("specaug: masked cell count is bounded by the mask budget") {
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Constant(100, 80, 3.5);
  SpecAugParams params;  // 2 freq masks <= 5 wide, 2 time masks <= 8 wide
  Rng rng(MixSeed(2));
  FeatureMatrix out = SpecAugment(feats, rng, params);
  CHECK(out.NumFrames() == 100);
  CHECK(out.Dim() == 80);
  int masked = 0;
  for (int t = 0; t < 100; ++t) {
    for (int j = 0; j < 80; ++j) {
      if (out.frames(t, j) == params.mask_value) {
        ++masked;
      } else {
        CHECK(out.frames(t, j) == 3.5);  // unmasked cells bit-identical
      }
    }
  }
  CHECK(masked <= 2 * 5 * 100 + 2 * 8 * 80);
}

TEST_CASE("specaug: dimensions never change and draws are deterministic") {
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(30, 20);
  SpecAugParams params;
  Rng rng_a(MixSeed(3)), rng_b(MixSeed(3));
  FeatureMatrix a = SpecAugment(feats, rng_a, params);
  FeatureMatrix b = SpecAugment(feats, rng_b, params);
  CHECK(a.frames == b.frames);
  CHECK(a.NumFrames() == 30);
  CHECK(a.Dim() == 20);
}

TEST_CASE("apply augment: VTLP factor 1.0 equals plain featurization") {
  Waveform wav = testutil::MakeSine(700.0, 0.5, 16000);
  Featurizer featurizer{FeatureConfig{}};
  Rng rng(MixSeed(4));
  AugmentSpec vtlp{AugmentMethod::kVtlp, 1.0, {}};
  FeatureMatrix warped = ApplyAugment(wav, vtlp, rng, featurizer);
  FeatureMatrix plain = featurizer.Features(wav);
  CHECK(warped.frames == plain.frames);

  AugmentSpec sp{AugmentMethod::kSpeedPerturb, 1.0, {}};
  FeatureMatrix sped = ApplyAugment(wav, sp, rng, featurizer);
  CHECK(sped.frames == plain.frames);
}

TEST_CASE("apply augment: speed 0.9 stretches the frame count by 1/0.9") {
  Waveform wav = testutil::MakeSine(700.0, 1.0, 16000);
  Featurizer featurizer{FeatureConfig{}};
  Rng rng(MixSeed(4));
  AugmentSpec spec{AugmentMethod::kSpeedPerturb, 0.9, {}};
  FeatureMatrix out = ApplyAugment(wav, spec, rng, featurizer);
  int resampled = static_cast<int>(std::lround(16000 / 0.9));
  CHECK(out.NumFrames() == NumFrames(resampled, 160, 400));
}

TEST_CASE("apply augment: none passes features through unchanged") {
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(10, 16);
  Rng rng(MixSeed(5));
  AugmentSpec none{AugmentMethod::kNone, 1.0, {}};
  FeatureMatrix out = ApplyAugment(feats, none, rng);
  CHECK(out.frames == feats.frames);
}

TEST_CASE("apply augment: method and input kind must agree") {
  Waveform wav = testutil::MakeSine(700.0, 0.2, 16000);
  Featurizer featurizer{FeatureConfig{}};
  Rng rng(MixSeed(6));
  AugmentSpec specaug{AugmentMethod::kSpecAug, 1.0, {}};
  CHECK_THROWS_AS(ApplyAugment(wav, specaug, rng, featurizer),
                  std::invalid_argument);
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(5, 4);
  AugmentSpec sp{AugmentMethod::kSpeedPerturb, 0.9, {}};
  CHECK_THROWS_AS(ApplyAugment(feats, sp, rng), std::invalid_argument);
}

TEST_CASE("feature cache: repeated lookups share one deterministic entry") {
  Waveform wav = testutil::MakeSine(500.0, 0.3, 16000);
  Featurizer featurizer{FeatureConfig{}};
  FeatureCache cache;
  auto a = cache.Get("utt1", AugmentMethod::kVtlp, 1.1, wav, featurizer);
  auto b = cache.Get("utt1", AugmentMethod::kVtlp, 1.1, wav, featurizer);
  CHECK(a.get() == b.get());
  CHECK(cache.NumEntries() == 1);
  // factor 1.0 normalizes to the plain entry regardless of method
  auto c = cache.Get("utt1", AugmentMethod::kSpeedPerturb, 1.0, wav, featurizer);
  auto d = cache.Get("utt1", AugmentMethod::kNone, 1.0, wav, featurizer);
  CHECK(c.get() == d.get());
  CHECK(cache.TouchedUttIds().count("utt1") == 1);
}

TEST_SUITE_END();
