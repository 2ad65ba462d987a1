// tests/tasks_test.cc
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

#include "mi/tasks.h"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "mi/common.h"
#include "mi/features.h"
#include "testutil.h"

using namespace mi;

namespace {

SynthSpec TinySpec() {
  SynthSpec spec;
  spec.n_age_groups = 3;
  spec.speakers_per_group = 6;
  spec.utterances_per_speaker = 4;
  spec.n_classes = 2;
  spec.duration_sec = 0.3;
  return spec;
}

// Average power spectrum of an utterance with a coarse FFT whose bins are
// wider than half the harmonic spacing, so the strongest harmonic lands in
// the bin of the first formant.
int PeakBin(const Waveform& wav, int n_fft) {
  FftPlan plan(n_fft);
  std::vector<double> acc(n_fft / 2 + 1, 0.0);
  for (int start = 0; start + n_fft <= wav.NumSamples(); start += n_fft) {
    std::vector<double> frame(wav.samples.begin() + start,
                              wav.samples.begin() + start + n_fft);
    std::vector<double> p = plan.PowerSpectrum(frame);
    for (size_t k = 0; k < p.size(); ++k) acc[k] += p[k];
  }
  int best = 1;
  for (size_t k = 1; k < acc.size(); ++k) {
    if (acc[k] > acc[best]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("tasks");

TEST_CASE("age group labels: kindergarten first, grades after") {
  CHECK(AgeGroupLabel(0) == "K");
  CHECK(AgeGroupLabel(1) == "G1");
  CHECK(AgeGroupLabel(10) == "G10");
  CHECK(AgeGroupIndex("K") == 0);
  CHECK(AgeGroupIndex("G7") == 7);
  CHECK_THROWS_AS(AgeGroupIndex("X3"), std::invalid_argument);
}

TEST_CASE("generate: deterministic and correctly sized") {
  SynthSpec spec = TinySpec();
  Rng rng_a(MixSeed(9)), rng_b(MixSeed(9));
  auto a = GenerateCorpus(spec, rng_a);
  auto b = GenerateCorpus(spec, rng_b);
  REQUIRE(a.size() == 3u * 6u * 4u);
  REQUIRE(b.size() == a.size());
  std::set<std::string> utt_ids, speaker_groups;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].utt_id == b[i].utt_id);
    CHECK(a[i].audio->samples == b[i].audio->samples);
    utt_ids.insert(a[i].utt_id);
    speaker_groups.insert(a[i].speaker_id + "|" + a[i].age_group);
  }
  CHECK(utt_ids.size() == a.size());          // utt ids unique
  CHECK(speaker_groups.size() == 3u * 6u);    // speaker maps to one group
}

TEST_CASE("generate: age scale is strictly decreasing with grade") {
  SynthSpec spec;
  for (int g = 1; g < spec.n_age_groups; ++g) {
    CHECK(spec.AgeScale(g) < spec.AgeScale(g - 1));
  }
  CHECK(spec.AgeScale(0) == 1.25);
}

// FFT peak-picking oracle: each class's spectrum peaks at its first formant.
TEST_CASE("generate: class spectra peak at their base formants") {
  SynthSpec spec;
  spec.n_age_groups = 1;
  spec.speakers_per_group = 4;
  spec.utterances_per_speaker = 4;
  spec.n_classes = 2;
  spec.age_scale_base = 1.0;  // identity scale for the lone group
  spec.age_scale_step = 0.0;
  spec.duration_sec = 0.5;
  spec.noise_snr_db = 30.0;
  spec.base_formants = {{730.0, 1090.0, 2440.0}, {270.0, 2290.0, 3010.0}};

  Rng rng(MixSeed(21));
  auto records = GenerateCorpus(spec, rng);
  int n_fft = 256;  // 62.5 Hz bins: wider than half the harmonic spacing
  double bin_hz = 16000.0 / n_fft;
  int hits = 0, total = 0;
  for (const auto& rec : records) {
    int expect = static_cast<int>(std::lround(
        spec.base_formants[rec.label][0] / bin_hz));
    int peak = PeakBin(*rec.audio, n_fft);
    if (std::abs(peak - expect) <= 1) ++hits;
    ++total;
  }
  CHECK(hits == total);
}

TEST_CASE("generate: age scale 1.2 shifts spectral peaks by 1.2") {
  SynthSpec spec;
  spec.n_age_groups = 1;
  spec.speakers_per_group = 4;
  spec.utterances_per_speaker = 2;
  spec.n_classes = 1;
  spec.duration_sec = 0.5;
  spec.noise_snr_db = 30.0;
  spec.base_formants = {{730.0, 1090.0, 2440.0}};

  int n_fft = 256;
  double bin_hz = 16000.0 / n_fft;
  for (double scale : {1.0, 1.2}) {
    spec.age_scale_base = scale;
    spec.age_scale_step = 0.0;
    Rng rng(MixSeed(22));
    auto records = GenerateCorpus(spec, rng);
    int expect = static_cast<int>(std::lround(730.0 * scale / bin_hz));
    for (const auto& rec : records) {
      CHECK(std::abs(PeakBin(*rec.audio, n_fft) - expect) <= 1);
    }
  }
}

TEST_CASE("generate: formant above Nyquist is rejected") {
  SynthSpec spec = TinySpec();
  spec.base_formants = {{730.0, 1090.0, 2440.0}, {270.0, 2290.0, 7900.0}};
  Rng rng(MixSeed(23));
  CHECK_THROWS_AS(GenerateCorpus(spec, rng), std::invalid_argument);
}

TEST_CASE("split: 100 speakers give exactly 70/8/22") {
  SynthSpec spec;
  spec.n_age_groups = 1;
  spec.speakers_per_group = 100;
  spec.utterances_per_speaker = 1;
  spec.n_classes = 1;
  spec.duration_sec = 0.05;
  Rng rng(MixSeed(24));
  auto records = GenerateCorpus(spec, rng);
  CorpusSplits splits = SplitCorpus(records, SplitSpec{});
  CHECK(splits.train.size() == 70u);
  CHECK(splits.dev.size() == 8u);
  CHECK(splits.test.size() == 22u);
}

TEST_CASE("split: 10 speakers round to 7/1/2 by largest remainder") {
  SynthSpec spec;
  spec.n_age_groups = 1;
  spec.speakers_per_group = 10;
  spec.utterances_per_speaker = 2;
  spec.n_classes = 1;
  spec.duration_sec = 0.05;
  Rng rng(MixSeed(25));
  auto records = GenerateCorpus(spec, rng);
  CorpusSplits splits = SplitCorpus(records, SplitSpec{});
  CHECK(splits.train.size() == 14u);
  CHECK(splits.dev.size() == 2u);
  CHECK(splits.test.size() == 4u);
}

TEST_CASE("split: speaker-disjoint for any seed") {
  SynthSpec spec = TinySpec();
  Rng rng(MixSeed(26));
  auto records = GenerateCorpus(spec, rng);
  for (uint64_t seed : {0ull, 1ull, 99ull}) {
    SplitSpec split_spec;
    split_spec.seed = seed;
    CorpusSplits splits = SplitCorpus(records, split_spec);
    auto speakers = [](const std::vector<UtteranceRecord>& recs) {
      std::set<std::string> s;
      for (const auto& r : recs) s.insert(r.speaker_id);
      return s;
    };
    std::set<std::string> train = speakers(splits.train);
    std::set<std::string> dev = speakers(splits.dev);
    std::set<std::string> test = speakers(splits.test);
    for (const auto& s : dev) CHECK(train.count(s) == 0);
    for (const auto& s : test) {
      CHECK(train.count(s) == 0);
      CHECK(dev.count(s) == 0);
    }
    // deterministic given the seed
    CorpusSplits again = SplitCorpus(records, split_spec);
    CHECK(again.train.size() == splits.train.size());
    for (size_t i = 0; i < splits.train.size(); ++i) {
      CHECK(again.train[i].utt_id == splits.train[i].utt_id);
    }
  }
}

TEST_CASE("split: validates ratios and minimum speakers") {
  SynthSpec spec = TinySpec();
  spec.speakers_per_group = 2;
  Rng rng(MixSeed(27));
  auto records = GenerateCorpus(spec, rng);
  CHECK_THROWS_AS(SplitCorpus(records, SplitSpec{}), std::invalid_argument);
  SplitSpec bad;
  bad.train = 0.5;  // no longer sums to 1
  Rng rng2(MixSeed(27));
  auto records2 = GenerateCorpus(TinySpec(), rng2);
  CHECK_THROWS_AS(SplitCorpus(records2, bad), std::invalid_argument);
}

TEST_CASE("build tasks: 11 groups give 9 training, 1 validation, 1 target") {
  SynthSpec spec;
  spec.speakers_per_group = 6;
  spec.utterances_per_speaker = 2;
  spec.duration_sec = 0.05;
  Rng rng(MixSeed(28));
  auto records = GenerateCorpus(spec, rng);
  CorpusSplits splits = SplitCorpus(records, SplitSpec{});
  TaskSetup setup = BuildTasks(splits);

  CHECK(setup.training.size() == 9u);
  CHECK(setup.training.front()->base_id == "G2");
  CHECK(setup.training.back()->base_id == "G10");
  CHECK(setup.validation->base_id == "G1");
  CHECK(setup.target.base_id == "K");

  // pool = train + dev utterances of that group (6 speakers -> 4/1/1)
  CHECK(setup.training[0]->pool.size() == 5u * 2u);
  CHECK(setup.target.train.size() == 4u * 2u);
  CHECK(setup.target.dev.size() == 1u * 2u);
  CHECK(setup.target.test.size() == 1u * 2u);

  // target test ids appear in no training pool
  std::set<std::string> test_ids;
  for (const auto& e : setup.target.test) test_ids.insert(e.utt_id);
  for (const auto& task : setup.training) {
    for (const auto& e : task->pool) CHECK(test_ids.count(e.utt_id) == 0);
  }
  for (const auto& e : setup.validation->pool) {
    CHECK(test_ids.count(e.utt_id) == 0);
  }
  // provenance tags recorded
  for (const auto& e : setup.target.test) {
    CHECK(e.provenance == SplitRole::kTest);
  }
}

TEST_CASE("build tasks: missing group is an error") {
  SynthSpec spec = TinySpec();
  Rng rng(MixSeed(29));
  auto records = GenerateCorpus(spec, rng);
  CorpusSplits splits = SplitCorpus(records, SplitSpec{});
  // drop every G1 record from the dev split
  CorpusSplits broken = splits;
  broken.dev.erase(std::remove_if(broken.dev.begin(), broken.dev.end(),
                                  [](const UtteranceRecord& r) {
                                    return r.age_group == "G1";
                                  }),
                   broken.dev.end());
  CHECK_THROWS_AS(BuildTasks(broken), std::invalid_argument);
}

TEST_CASE("manifests: round trip, empty file, malformed line") {
  SynthSpec spec = TinySpec();
  Rng rng(MixSeed(30));
  auto records = GenerateCorpus(spec, rng);
  for (auto& r : records) r.source = "wavs/" + r.utt_id + ".wav";

  std::string path = "tasks_manifest.jsonl";
  WriteManifest(records, path);
  auto loaded = LoadManifest(path);
  REQUIRE(loaded.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded[i].utt_id == records[i].utt_id);
    CHECK(loaded[i].speaker_id == records[i].speaker_id);
    CHECK(loaded[i].age_group == records[i].age_group);
    CHECK(loaded[i].source == records[i].source);
    CHECK(loaded[i].label == records[i].label);
  }
  std::remove(path.c_str());

  std::ofstream(path) << "";
  CHECK(LoadManifest(path).empty());
  std::remove(path.c_str());

  std::ofstream(path) << "{\"utt_id\": \"u\", \"speaker_id\": \"s\"}\n";
  try {
    LoadManifest(path);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  std::remove(path.c_str());
}

// A linear classifier on mean log-mel features separates the classes within
// one age group; this guarantees the synthetic learning problem is
// non-degenerate. The classifier is trained here, in test code.
TEST_CASE("separability: linear probe exceeds 90% within one age group") {
  SynthSpec spec;
  spec.n_age_groups = 1;
  spec.speakers_per_group = 10;
  spec.utterances_per_speaker = 10;
  spec.age_scale_base = 1.25;
  spec.age_scale_step = 0.0;
  Rng rng(MixSeed(31));
  auto records = GenerateCorpus(spec, rng);

  FeatureConfig config;
  config.stack = 0;
  Featurizer featurizer(config);
  int n = static_cast<int>(records.size());
  int d = config.n_mels;
  int n_classes = spec.n_classes;
  Eigen::MatrixXd x(n, d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    FeatureMatrix feats = featurizer.Features(*records[i].audio);
    x.row(i) = feats.frames.colwise().mean();
    y[i] = records[i].label;
  }
  // normalize columns
  Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;
  double sd = std::sqrt(x.squaredNorm() / (n * d));
  x /= sd;

  // multinomial logistic regression by plain gradient descent (oracle-only)
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_classes, d);
  int train_n = n / 2;
  for (int it = 0; it < 500; ++it) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n_classes, d);
    for (int i = 0; i < train_n; ++i) {
      Eigen::VectorXd logits = w * x.row(i).transpose();
      Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
      p /= p.sum();
      p(y[i]) -= 1.0;
      grad += p * x.row(i);
    }
    w -= (1.0 / train_n) * grad;
  }
  int correct = 0;
  for (int i = train_n; i < n; ++i) {
    Eigen::Index pred;
    (w * x.row(i).transpose()).maxCoeff(&pred);
    if (static_cast<int>(pred) == y[i]) ++correct;
  }
  double accuracy = static_cast<double>(correct) / (n - train_n);
  CHECK(accuracy > 0.9);
}

TEST_SUITE_END();
