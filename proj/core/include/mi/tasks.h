// mi/tasks.h  --  corpus synthesis, speaker-disjoint splits, task assembly
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

#ifndef MI_TASKS_H_
#define MI_TASKS_H_

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mi/augment.h"
#include "mi/common.h"
#include "mi/model.h"
#include "mi/wav.h"

namespace mi {

// One utterance of the corpus. `audio` is populated by the generator or by
// LoadManifestAudio; manifests persist only the metadata.
struct UtteranceRecord {
  std::string utt_id;
  std::string speaker_id;
  std::string age_group;  // "K", "G1" .. "G10"
  std::string source;     // wav path, empty for in-memory corpora
  int label = 0;
  std::shared_ptr<const Waveform> audio;
};

// Age-group labels ordered youngest to oldest: index 0 is kindergarten "K",
// index g >= 1 is grade "G<g>".
std::string AgeGroupLabel(int index);
int AgeGroupIndex(const std::string& label);

struct SplitSpec {
  double train = 0.70;
  double dev = 0.08;
  double test = 0.22;
  uint64_t seed = 0;

  void Validate() const;
};

// Synthetic age-parameterized vowel corpus. Each utterance is a harmonic
// source shaped by the class's formant resonances; the per-group age scale
// multiplies both f0 and the formants, with the youngest group shifted the
// most.
struct SynthSpec {
  int n_age_groups = 11;
  int speakers_per_group = 12;
  int utterances_per_speaker = 10;
  int n_classes = 5;
  int sample_rate = 16000;
  double duration_sec = 1.0;
  double f0_base_hz = 110.0;
  std::vector<std::array<double, 3>> base_formants;  // Hz per class
  std::array<double, 3> formant_bandwidths = {60.0, 90.0, 120.0};
  double age_scale_base = 1.25;
  double age_scale_step = 0.025;
  double speaker_jitter = 0.05;  // uniform +-fraction, per speaker
  double utterance_jitter = 0.02;
  double noise_snr_db = 12.0;

  // 1.25 - 0.025 * g: strictly decreasing with grade, youngest largest.
  double AgeScale(int group_index) const;
  void Validate() const;
};

// Five vowel classes with classic adult formant triples.
std::vector<std::array<double, 3>> DefaultFormants();

std::vector<UtteranceRecord> GenerateCorpus(const SynthSpec& spec, Rng& rng);

struct CorpusSplits {
  std::vector<UtteranceRecord> train;
  std::vector<UtteranceRecord> dev;
  std::vector<UtteranceRecord> test;
};

// Speaker-disjoint partition per age group. Speaker counts follow
// largest-remainder rounding of the ratios, so 10 speakers split 7/1/2 and
// 100 split 70/8/22.
CorpusSplits SplitCorpus(const std::vector<UtteranceRecord>& records,
                         const SplitSpec& spec);

// One item of a task's sampling pool. `method`/`factor` record a raw-level
// warp baked into the pool (the Raw Aug control); `cache_id` keys feature
// caching by the underlying audio.
struct PoolEntry {
  std::string utt_id;    // unique within the pool
  std::string cache_id;  // original utterance id
  int label = 0;
  std::shared_ptr<const Waveform> audio;
  SplitRole provenance = SplitRole::kTrain;
  AugmentMethod method = AugmentMethod::kNone;
  double factor = 1.0;
};

struct AugmentTag {
  AugmentMethod method = AugmentMethod::kNone;
  double factor = 1.0;
};

// A task is an age group's utterance pool; simulated tasks carry an
// augment_tag like G2^sp0.9 and share the original audio.
struct Task {
  std::string base_id;  // "G2"
  std::optional<AugmentTag> tag;
  std::vector<PoolEntry> pool;

  std::string Id() const;
};

using TaskPtr = std::shared_ptr<const Task>;
using TaskList = std::vector<TaskPtr>;

// The meta-testing task keeps its three splits separate; the test split must
// never be touched by a training path.
struct TargetTask {
  std::string base_id;
  std::vector<PoolEntry> train;
  std::vector<PoolEntry> dev;
  std::vector<PoolEntry> test;
};

struct TaskSetup {
  TaskList training;   // oldest groups, train+dev pooled, ascending age order
  TaskPtr validation;  // second-youngest group, train+dev pooled
  TargetTask target;   // youngest group, splits preserved
};

// Training tasks come from the oldest groups (train+dev pools combined), the
// second-youngest group becomes the validation task and the youngest group is
// the fine-tuning target. Requires every group present with all three splits.
TaskSetup BuildTasks(const CorpusSplits& splits);

// JSONL manifests: one object per line with utt_id, speaker_id, age, source,
// label. Round trips are identity on those fields; parse errors name the
// offending line.
void WriteManifest(const std::vector<UtteranceRecord>& records,
                   const std::string& path);
std::vector<UtteranceRecord> LoadManifest(const std::string& path);

// Reads each record's wav from record.source, resolved relative to base_dir
// when not absolute.
void LoadManifestAudio(std::vector<UtteranceRecord>* records,
                       const std::string& base_dir);

}  // namespace mi

#endif  // MI_TASKS_H_
