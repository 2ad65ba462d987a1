// core/src/tasks.cc
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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mi {

std::string AgeGroupLabel(int index) {
  Require(index >= 0, "AgeGroupLabel: negative index");
  if (index == 0) return "K";
  return "G" + std::to_string(index);
}

int AgeGroupIndex(const std::string& label) {
  if (label == "K") return 0;
  if (label.size() >= 2 && label[0] == 'G') {
    int v = std::atoi(label.c_str() + 1);
    if (v >= 1) return v;
  }
  throw std::invalid_argument("AgeGroupIndex: bad age group label " + label);
}

void SplitSpec::Validate() const {
  Require(train > 0.0 && dev >= 0.0 && test >= 0.0,
          "SplitSpec: ratios must be nonnegative with train > 0");
  Require(std::abs(train + dev + test - 1.0) < 1e-9,
          "SplitSpec: ratios must sum to 1.0");
}

double SynthSpec::AgeScale(int group_index) const {
  return age_scale_base - age_scale_step * group_index;
}

void SynthSpec::Validate() const {
  Require(n_age_groups >= 1, "SynthSpec: n_age_groups must be >= 1");
  Require(speakers_per_group >= 1, "SynthSpec: speakers_per_group >= 1");
  Require(utterances_per_speaker >= 1, "SynthSpec: utterances_per_speaker >= 1");
  Require(n_classes >= 1, "SynthSpec: n_classes >= 1");
  Require(sample_rate > 0, "SynthSpec: sample_rate > 0");
  Require(duration_sec > 0.0, "SynthSpec: duration_sec > 0");
  Require(f0_base_hz > 0.0, "SynthSpec: f0_base_hz > 0");
  Require(age_scale_step >= 0.0, "SynthSpec: age_scale_step >= 0");
  Require(AgeScale(n_age_groups - 1) > 0.0,
          "SynthSpec: age scale must stay positive for the oldest group");
  Require(noise_snr_db > 0.0, "SynthSpec: noise_snr_db must be positive");
}

std::vector<std::array<double, 3>> DefaultFormants() {
  // Peterson-Barney style vowel triples: /a/ /e/ /i/ /o/ /u/.
  return {{730.0, 1090.0, 2440.0},
          {530.0, 1840.0, 2480.0},
          {270.0, 2290.0, 3010.0},
          {570.0, 840.0, 2410.0},
          {300.0, 870.0, 2240.0}};
}

namespace {

// Second-order resonator with unity DC gain, applied in place.
void ApplyResonator(std::vector<double>* x, double freq_hz, double bw_hz,
                    int sample_rate) {
  double r = std::exp(-M_PI * bw_hz / sample_rate);
  double b1 = 2.0 * r * std::cos(2.0 * M_PI * freq_hz / sample_rate);
  double b2 = -r * r;
  double a0 = 1.0 - b1 - b2;
  double y1 = 0.0, y2 = 0.0;
  for (double& v : *x) {
    double y = a0 * v + b1 * y1 + b2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

Waveform SynthesizeUtterance(const SynthSpec& spec, double f0,
                             const std::array<double, 3>& formants,
                             double start_phase, Rng& rng) {
  double nyquist = spec.sample_rate / 2.0;
  for (double f : formants) {
    if (f >= 0.97 * nyquist)
      throw std::invalid_argument("SynthesizeUtterance: formant above Nyquist");
  }

  int n = static_cast<int>(std::lround(spec.duration_sec * spec.sample_rate));
  std::vector<double> x(n, 0.0);

  // Harmonic source: impulse train through a gentle one-pole rolloff.
  double phase = start_phase;
  for (int i = 0; i < n; ++i) {
    phase += f0 / spec.sample_rate;
    if (phase >= 1.0) {
      phase -= 1.0;
      x[i] = 1.0;
    }
  }
  double rho = std::exp(-2.0 * M_PI * 500.0 / spec.sample_rate);
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    prev = (1.0 - rho) * x[i] + rho * prev;
    x[i] = prev;
  }

  for (int j = 0; j < 3; ++j) {
    ApplyResonator(&x, formants[j], spec.formant_bandwidths[j],
                   spec.sample_rate);
  }

  double rms = 0.0;
  for (double v : x) rms += v * v;
  rms = std::sqrt(rms / n);
  double target_rms = 0.15;
  double gain = rms > 0.0 ? target_rms / rms : 0.0;
  double noise_amp =
      target_rms * std::pow(10.0, -spec.noise_snr_db / 20.0) * std::sqrt(3.0);
  double peak = 0.0;
  for (double& v : x) {
    v = v * gain + noise_amp * (2.0 * RandUniform(rng) - 1.0);
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.99) {
    double s = 0.99 / peak;
    for (double& v : x) v *= s;
  }

  Waveform wav;
  wav.sample_rate = spec.sample_rate;
  wav.samples = std::move(x);
  return wav;
}

std::string Pad2(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

}  // namespace

std::vector<UtteranceRecord> GenerateCorpus(const SynthSpec& spec, Rng& rng) {
  spec.Validate();
  std::vector<std::array<double, 3>> formants =
      spec.base_formants.empty() ? DefaultFormants() : spec.base_formants;
  Require(static_cast<int>(formants.size()) >= spec.n_classes,
          "GenerateCorpus: need a formant triple per class");

  std::vector<UtteranceRecord> records;
  records.reserve(static_cast<size_t>(spec.n_age_groups) *
                  spec.speakers_per_group * spec.utterances_per_speaker);
  for (int g = 0; g < spec.n_age_groups; ++g) {
    std::string group = AgeGroupLabel(g);
    double scale = spec.AgeScale(g);
    for (int s = 0; s < spec.speakers_per_group; ++s) {
      std::string speaker = group + "_s" + Pad2(s);
      double spk_f0 =
          1.0 + spec.speaker_jitter * (2.0 * RandUniform(rng) - 1.0);
      double spk_formant =
          1.0 + spec.speaker_jitter * (2.0 * RandUniform(rng) - 1.0);
      for (int u = 0; u < spec.utterances_per_speaker; ++u) {
        int label = u % spec.n_classes;
        double utt_f0 =
            1.0 + spec.utterance_jitter * (2.0 * RandUniform(rng) - 1.0);
        std::array<double, 3> f;
        for (int j = 0; j < 3; ++j) {
          double utt_jit =
              1.0 + spec.utterance_jitter * (2.0 * RandUniform(rng) - 1.0);
          f[j] = formants[label][j] * scale * spk_formant * utt_jit;
        }
        double start_phase = RandUniform(rng);
        double f0 = spec.f0_base_hz * scale * spk_f0 * utt_f0;

        UtteranceRecord rec;
        rec.utt_id = speaker + "_u" + Pad2(u);
        rec.speaker_id = speaker;
        rec.age_group = group;
        rec.label = label;
        rec.audio = std::make_shared<const Waveform>(
            SynthesizeUtterance(spec, f0, f, start_phase, rng));
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

CorpusSplits SplitCorpus(const std::vector<UtteranceRecord>& records,
                         const SplitSpec& spec) {
  spec.Validate();
  Require(!records.empty(), "SplitCorpus: empty corpus");

  // Group speakers per age; map iteration keeps group order deterministic.
  std::map<std::string, std::set<std::string>> speakers_by_group;
  for (const auto& rec : records) {
    speakers_by_group[rec.age_group].insert(rec.speaker_id);
  }

  Rng rng(MixSeed(spec.seed, 0x5eedful));
  std::map<std::string, int> speaker_role;  // 0 train, 1 dev, 2 test
  for (const auto& [group, speaker_set] : speakers_by_group) {
    std::vector<std::string> speakers(speaker_set.begin(), speaker_set.end());
    int n = static_cast<int>(speakers.size());
    Require(n >= 3, "SplitCorpus: fewer than 3 speakers in group " + group);

    // Largest-remainder allocation over whole speakers.
    double exact[3] = {spec.train * n, spec.dev * n, spec.test * n};
    int counts[3];
    double remainder[3];
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
      counts[i] = static_cast<int>(std::floor(exact[i]));
      remainder[i] = exact[i] - counts[i];
      assigned += counts[i];
    }
    while (assigned < n) {
      int best = 0;
      for (int i = 1; i < 3; ++i) {
        if (remainder[i] > remainder[best]) best = i;
      }
      ++counts[best];
      remainder[best] = -1.0;
      ++assigned;
    }

    // Shuffle, then slice contiguously into train/dev/test.
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(RandInt(rng, 0, i));
      std::swap(speakers[i], speakers[j]);
    }
    for (int i = 0; i < n; ++i) {
      int role = i < counts[0] ? 0 : (i < counts[0] + counts[1] ? 1 : 2);
      speaker_role[speakers[i]] = role;
    }
  }

  CorpusSplits splits;
  for (const auto& rec : records) {
    switch (speaker_role.at(rec.speaker_id)) {
      case 0: splits.train.push_back(rec); break;
      case 1: splits.dev.push_back(rec); break;
      default: splits.test.push_back(rec); break;
    }
  }
  return splits;
}

std::string Task::Id() const {
  if (!tag.has_value()) return base_id;
  std::ostringstream os;
  os << base_id << "^" << AugmentMethodName(tag->method) << tag->factor;
  return os.str();
}

namespace {

PoolEntry MakePoolEntry(const UtteranceRecord& rec, SplitRole role) {
  Require(rec.audio != nullptr,
          "BuildTasks: record " + rec.utt_id + " has no audio loaded");
  PoolEntry entry;
  entry.utt_id = rec.utt_id;
  entry.cache_id = rec.utt_id;
  entry.label = rec.label;
  entry.audio = rec.audio;
  entry.provenance = role;
  return entry;
}

}  // namespace

TaskSetup BuildTasks(const CorpusSplits& splits) {
  // Collect per-group, per-split records.
  std::map<int, std::vector<PoolEntry>> train, dev, test;
  auto collect = [](const std::vector<UtteranceRecord>& recs, SplitRole role,
                    std::map<int, std::vector<PoolEntry>>* out) {
    for (const auto& rec : recs) {
      (*out)[AgeGroupIndex(rec.age_group)].push_back(MakePoolEntry(rec, role));
    }
  };
  collect(splits.train, SplitRole::kTrain, &train);
  collect(splits.dev, SplitRole::kDev, &dev);
  collect(splits.test, SplitRole::kTest, &test);

  Require(!train.empty(), "BuildTasks: empty corpus");
  int n_groups = train.rbegin()->first + 1;
  Require(n_groups >= 3,
          "BuildTasks: need at least 3 age groups (target, validation, "
          "training)");
  for (int g = 0; g < n_groups; ++g) {
    Require(train.count(g) && dev.count(g) && test.count(g),
            "BuildTasks: missing split data for group " + AgeGroupLabel(g));
  }

  auto pooled = [&](int g) {
    std::vector<PoolEntry> pool = train.at(g);
    pool.insert(pool.end(), dev.at(g).begin(), dev.at(g).end());
    return pool;
  };

  TaskSetup setup;
  for (int g = 2; g < n_groups; ++g) {
    auto task = std::make_shared<Task>();
    task->base_id = AgeGroupLabel(g);
    task->pool = pooled(g);
    setup.training.push_back(std::move(task));
  }
  auto valid = std::make_shared<Task>();
  valid->base_id = AgeGroupLabel(1);
  valid->pool = pooled(1);
  setup.validation = std::move(valid);

  setup.target.base_id = AgeGroupLabel(0);
  setup.target.train = train.at(0);
  setup.target.dev = dev.at(0);
  setup.target.test = test.at(0);
  return setup;
}

void WriteManifest(const std::vector<UtteranceRecord>& records,
                   const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("WriteManifest: cannot open " + path);
  for (const auto& rec : records) {
    nlohmann::json j;
    j["utt_id"] = rec.utt_id;
    j["speaker_id"] = rec.speaker_id;
    j["age"] = rec.age_group;
    j["source"] = rec.source;
    j["label"] = rec.label;
    os << j.dump() << "\n";
  }
  if (!os) throw std::runtime_error("WriteManifest: write failed " + path);
}

std::vector<UtteranceRecord> LoadManifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("LoadManifest: cannot open " + path);
  std::vector<UtteranceRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("LoadManifest: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    UtteranceRecord rec;
    try {
      rec.utt_id = j.at("utt_id").get<std::string>();
      rec.speaker_id = j.at("speaker_id").get<std::string>();
      rec.age_group = j.at("age").get<std::string>();
      rec.source = j.at("source").get<std::string>();
      rec.label = j.at("label").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("LoadManifest: line " + std::to_string(line_no) +
                               ": missing field: " + e.what());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void LoadManifestAudio(std::vector<UtteranceRecord>* records,
                       const std::string& base_dir) {
  namespace fs = std::filesystem;
  for (auto& rec : *records) {
    Require(!rec.source.empty(),
            "LoadManifestAudio: record " + rec.utt_id + " has no source path");
    fs::path p(rec.source);
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    rec.audio = std::make_shared<const Waveform>(ReadWav(p.string()));
  }
}

}  // namespace mi
