// benchmarks/augment_bench.cc
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

#include <benchmark/benchmark.h>

#include <cmath>

#include "mi/augment.h"

namespace {

mi::Waveform OneSecondTone() {
  mi::Waveform wav;
  wav.sample_rate = 16000;
  wav.samples.resize(16000);
  for (int i = 0; i < 16000; ++i) {
    wav.samples[i] = 0.4 * std::sin(2.0 * M_PI * 440.0 * i / 16000.0);
  }
  return wav;
}

void BM_SpeedPerturb(benchmark::State& state) {
  mi::Waveform wav = OneSecondTone();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi::SpeedPerturb(wav, 1.1));
  }
  state.SetItemsProcessed(state.iterations() * wav.NumSamples());
}
BENCHMARK(BM_SpeedPerturb);

void BM_SpecAugment(benchmark::State& state) {
  mi::FeatureMatrix feats;
  feats.frames = Eigen::MatrixXd::Random(98, 80);
  mi::SpecAugParams params;
  mi::Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi::SpecAugment(feats, rng, params));
  }
}
BENCHMARK(BM_SpecAugment);

void BM_VtlpFeaturize(benchmark::State& state) {
  mi::Waveform wav = OneSecondTone();
  mi::Featurizer featurizer{mi::FeatureConfig{}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        featurizer.Features(wav, mi::AugmentMethod::kVtlp, 1.1));
  }
}
BENCHMARK(BM_VtlpFeaturize);

}  // namespace
