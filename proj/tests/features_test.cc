// tests/features_test.cc
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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mi/augment.h"
#include "mi/common.h"
#include "testutil.h"

using namespace mi;

TEST_SUITE_BEGIN("features");

TEST_CASE("filterbank: standard 80x512 bank at identity warp") {
  MelFilterbank fb = BuildMelFilterbank(80, 512, 16000, 1.0);
  CHECK(fb.weights.rows() == 80);
  CHECK(fb.weights.cols() == 257);
  for (int m = 1; m < 80; ++m) {
    CHECK(fb.center_freqs(m) > fb.center_freqs(m - 1));
  }
  CHECK((fb.weights.array() >= 0.0).all());
  for (int m = 0; m < 80; ++m) {
    CHECK(fb.weights.row(m).sum() > 0.0);
  }
}

TEST_CASE("filterbank: rows are unimodal and zero outside their band") {
  MelFilterbank fb = BuildMelFilterbank(40, 512, 16000, 1.0);
  for (int m = 0; m < fb.n_mels; ++m) {
    // rises to a single peak, then falls
    int peak = 0;
    for (int k = 1; k < fb.weights.cols(); ++k) {
      if (fb.weights(m, k) > fb.weights(m, peak)) peak = k;
    }
    for (int k = 1; k <= peak; ++k) {
      CHECK(fb.weights(m, k) >= fb.weights(m, k - 1) - 1e-12);
    }
    for (int k = peak + 1; k < fb.weights.cols(); ++k) {
      CHECK(fb.weights(m, k) <= fb.weights(m, k - 1) + 1e-12);
    }
  }
}

// Brute-force mel-scale point computation, independent of the library path.
TEST_CASE("filterbank: two filters partition [0, 8000] on the mel scale") {
  MelFilterbank fb = BuildMelFilterbank(2, 512, 16000, 1.0);
  double mel_max = 2595.0 * std::log10(1.0 + 8000.0 / 700.0);
  auto inv = [](double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
  };
  double expect_c0 = inv(mel_max / 3.0);
  double expect_c1 = inv(2.0 * mel_max / 3.0);
  CHECK(fb.center_freqs(0) == doctest::Approx(expect_c0).epsilon(1e-12));
  CHECK(fb.center_freqs(1) == doctest::Approx(expect_c1).epsilon(1e-12));
  // triangles overlap: filter 0 falls from its center to filter 1's center
  CHECK(fb.weights.row(0).sum() > 0.0);
  CHECK(fb.weights.row(1).sum() > 0.0);
}

TEST_CASE("filterbank: warp 1.1 scales sub-knee centers by exactly 1.1") {
  MelFilterbank plain = BuildMelFilterbank(80, 512, 16000, 1.0);
  MelFilterbank warped = BuildMelFilterbank(80, 512, 16000, 1.1);
  double knee = 0.85 * 8000.0 / 1.1;
  int checked = 0;
  for (int m = 0; m < 80; ++m) {
    if (plain.center_freqs(m) <= knee) {
      CHECK(warped.center_freqs(m) ==
            doctest::Approx(1.1 * plain.center_freqs(m)).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked > 60);  // most of the bank sits below the knee
}

TEST_CASE("filterbank: warp 1.0 is bit-identical to the unwarped bank") {
  MelFilterbank a = BuildMelFilterbank(80, 512, 16000, 1.0);
  MelFilterbank b = BuildMelFilterbank(80, 512, 16000, 1.0);
  CHECK(a.weights == b.weights);
  CHECK(a.center_freqs == b.center_freqs);
}

TEST_CASE("filterbank: argument validation") {
  CHECK_THROWS_AS(BuildMelFilterbank(80, 512, 16000, 0.4),
                  std::invalid_argument);
  CHECK_THROWS_AS(BuildMelFilterbank(80, 512, 16000, 2.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(BuildMelFilterbank(300, 512, 16000, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BuildMelFilterbank(80, 500, 16000, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BuildMelFilterbank(0, 512, 16000, 1.0),
                  std::invalid_argument);
}

TEST_CASE("logmel: one second at 16 kHz gives 98 frames") {
  Waveform wav = testutil::MakeSine(440.0, 1.0, 16000);
  FeatureConfig config;
  MelFilterbank fb = BuildMelFilterbank(config.n_mels, config.n_fft, 16000);
  FeatureMatrix feats = ComputeLogMel(wav, fb, config);
  CHECK(feats.NumFrames() == 98);
  CHECK(feats.Dim() == 80);
  CHECK(feats.frames.allFinite());
}

TEST_CASE("logmel: frame count matches the closed-form formula") {
  Rng rng(MixSeed(42));
  for (int trial = 0; trial < 50; ++trial) {
    int shift = static_cast<int>(RandInt(rng, 1, 300));
    int length = static_cast<int>(RandInt(rng, shift, 500));
    int n = static_cast<int>(RandInt(rng, length, 20000));
    CHECK(NumFrames(n, shift, length) == (n - length) / shift + 1);
  }
}

TEST_CASE("logmel: all-zero waveform maps every cell to log(floor_eps)") {
  Waveform wav;
  wav.sample_rate = 16000;
  wav.samples.assign(16000, 0.0);
  FeatureConfig config;
  MelFilterbank fb = BuildMelFilterbank(80, 512, 16000);
  FeatureMatrix feats = ComputeLogMel(wav, fb, config);
  double expect = std::log(config.floor_eps);
  CHECK((feats.frames.array() == expect).all());
}

TEST_CASE("logmel: sinusoid at a filter center wins that filter's column") {
  FeatureConfig config;
  MelFilterbank fb = BuildMelFilterbank(80, 512, 16000);
  int target = 30;
  Waveform wav = testutil::MakeSine(fb.center_freqs(target), 1.0, 16000);
  FeatureMatrix feats = ComputeLogMel(wav, fb, config);
  for (int t = 1; t + 1 < feats.NumFrames(); ++t) {
    Eigen::Index argmax = 0;
    feats.frames.row(t).maxCoeff(&argmax);
    CHECK(std::abs(static_cast<int>(argmax) - target) <= 1);
  }
}

TEST_CASE("logmel: deterministic, bit-identical across calls") {
  Rng rng(MixSeed(7));
  Waveform wav;
  wav.sample_rate = 16000;
  wav.samples.resize(8000);
  for (double& s : wav.samples) s = RandRange(rng, -0.5, 0.5);
  FeatureConfig config;
  MelFilterbank fb = BuildMelFilterbank(80, 512, 16000);
  FeatureMatrix a = ComputeLogMel(wav, fb, config);
  FeatureMatrix b = ComputeLogMel(wav, fb, config);
  CHECK(a.frames == b.frames);
}

TEST_CASE("logmel: error paths") {
  FeatureConfig config;
  MelFilterbank fb = BuildMelFilterbank(80, 512, 16000);
  Waveform too_short;
  too_short.sample_rate = 16000;
  too_short.samples.assign(100, 0.1);
  CHECK_THROWS_AS(ComputeLogMel(too_short, fb, config), std::invalid_argument);

  Waveform with_nan;
  with_nan.sample_rate = 16000;
  with_nan.samples.assign(16000, 0.1);
  with_nan.samples[123] = std::nan("");
  CHECK_THROWS_AS(ComputeLogMel(with_nan, fb, config), std::invalid_argument);
}

TEST_CASE("logmel: mean normalization flag centers each column") {
  Waveform wav = testutil::MakeSine(1000.0, 0.5, 16000);
  FeatureConfig config;
  config.mean_normalize = true;
  MelFilterbank fb = BuildMelFilterbank(80, 512, 16000);
  FeatureMatrix feats = ComputeLogMel(wav, fb, config);
  Eigen::RowVectorXd mean = feats.frames.colwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stack: doubles the dimension and keeps the frame count") {
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(98, 80);
  FeatureMatrix stacked = StackFrames(feats, 1);
  CHECK(stacked.NumFrames() == 98);
  CHECK(stacked.Dim() == 160);
  // row t = [frame t, frame t+1]
  for (int t = 0; t + 1 < 98; ++t) {
    CHECK(stacked.frames.block(t, 0, 1, 80) == feats.frames.row(t));
    CHECK(stacked.frames.block(t, 80, 1, 80) == feats.frames.row(t + 1));
  }
  // final row repeats the last frame
  CHECK(stacked.frames.block(97, 80, 1, 80) == feats.frames.row(97));
}

TEST_CASE("stack: n_append 0 is the identity") {
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(10, 8);
  FeatureMatrix out = StackFrames(feats, 0);
  CHECK(out.frames == feats.frames);
}

TEST_CASE("stack: single frame concatenates with itself") {
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(1, 5);
  FeatureMatrix out = StackFrames(feats, 1);
  CHECK(out.NumFrames() == 1);
  CHECK(out.frames.block(0, 0, 1, 5) == feats.frames.row(0));
  CHECK(out.frames.block(0, 5, 1, 5) == feats.frames.row(0));
}

TEST_CASE("stack: dimension multiplies by 1 + n_append") {
  Rng rng(MixSeed(3));
  for (int trial = 0; trial < 10; ++trial) {
    int t_count = static_cast<int>(RandInt(rng, 1, 30));
    int d = static_cast<int>(RandInt(rng, 1, 12));
    int n_append = static_cast<int>(RandInt(rng, 0, 4));
    FeatureMatrix feats;
    feats.frames = Eigen::MatrixXd::Random(t_count, d);
    FeatureMatrix out = StackFrames(feats, n_append);
    CHECK(out.NumFrames() == t_count);
    CHECK(out.Dim() == d * (1 + n_append));
  }
  FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(4, 4);
  CHECK_THROWS_AS(StackFrames(feats, -1), std::invalid_argument);
}

TEST_CASE("feature files: write/read round trip is bit-exact") {
  Rng rng(MixSeed(11));
  FeatureMatrix feats;
  feats.frames.resize(17, 9);
  for (int t = 0; t < 17; ++t) {
    for (int j = 0; j < 9; ++j) feats.frames(t, j) = RandRange(rng, -30, 5);
  }
  std::string path = "features_roundtrip.mifb";
  WriteFeatureFile(path, feats);
  FeatureMatrix loaded = ReadFeatureFile(path);
  CHECK(loaded.NumFrames() == 17);
  CHECK(loaded.Dim() == 9);

  // A second write of the loaded matrix must be byte-identical.
  std::string path2 = "features_roundtrip2.mifb";
  WriteFeatureFile(path2, loaded);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::string bytes_a((std::istreambuf_iterator<char>(a)),
                      std::istreambuf_iterator<char>());
  std::string bytes_b((std::istreambuf_iterator<char>(b)),
                      std::istreambuf_iterator<char>());
  CHECK(bytes_a == bytes_b);
  // and loading again gives bit-identical floats
  FeatureMatrix again = ReadFeatureFile(path2);
  CHECK(again.frames == loaded.frames);
  std::remove(path.c_str());
  std::remove(path2.c_str());

  CHECK_THROWS(ReadFeatureFile("no_such_file.mifb"));
}

TEST_SUITE_END();
