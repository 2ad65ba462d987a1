// core/src/config.cc
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

#include "mi/config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mi {

namespace {

std::string Trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

Ini Ini::FromFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("Ini: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return FromString(buf.str());
}

Ini Ini::FromString(const std::string& text) {
  Ini ini;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw std::runtime_error("Ini: line " + std::to_string(line_no) +
                                 ": malformed section header");
      }
      section = Trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("Ini: line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    std::string key = Trim(t.substr(0, eq));
    std::string value = Trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("Ini: line " + std::to_string(line_no) +
                               ": empty key");
    }
    ini.sections_[section][key] = value;
  }
  return ini;
}

bool Ini::Has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string Ini::GetString(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return fallback;
  auto kv = it->second.find(key);
  return kv == it->second.end() ? fallback : kv->second;
}

int64_t Ini::GetInt(const std::string& section, const std::string& key,
                    int64_t fallback) const {
  if (!Has(section, key)) return fallback;
  const std::string v = GetString(section, key, "");
  size_t pos = 0;
  int64_t out = std::stoll(v, &pos);
  Require(pos == v.size(), "Ini: [" + section + "] " + key +
                               " is not an integer: " + v);
  return out;
}

double Ini::GetDouble(const std::string& section, const std::string& key,
                      double fallback) const {
  if (!Has(section, key)) return fallback;
  const std::string v = GetString(section, key, "");
  size_t pos = 0;
  double out = std::stod(v, &pos);
  Require(pos == v.size(),
          "Ini: [" + section + "] " + key + " is not a number: " + v);
  return out;
}

bool Ini::GetBool(const std::string& section, const std::string& key,
                  bool fallback) const {
  if (!Has(section, key)) return fallback;
  std::string v = GetString(section, key, "");
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("Ini: [" + section + "] " + key +
                              " is not a boolean: " + v);
}

std::vector<double> Ini::GetDoubleList(
    const std::string& section, const std::string& key,
    const std::vector<double>& fallback) const {
  if (!Has(section, key)) return fallback;
  std::vector<double> out;
  for (const std::string& item : SplitList(GetString(section, key, ""))) {
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int64_t> Ini::GetIntList(
    const std::string& section, const std::string& key,
    const std::vector<int64_t>& fallback) const {
  if (!Has(section, key)) return fallback;
  std::vector<int64_t> out;
  for (const std::string& item : SplitList(GetString(section, key, ""))) {
    out.push_back(std::stoll(item));
  }
  return out;
}

std::vector<std::string> Ini::GetStringList(
    const std::string& section, const std::string& key,
    const std::vector<std::string>& fallback) const {
  if (!Has(section, key)) return fallback;
  return SplitList(GetString(section, key, ""));
}

SynthSpec ParseSynthSpec(const Ini& ini, const SynthSpec& defaults) {
  SynthSpec spec = defaults;
  const std::string s = "corpus";
  spec.n_age_groups = static_cast<int>(ini.GetInt(s, "n_age_groups", spec.n_age_groups));
  spec.speakers_per_group = static_cast<int>(
      ini.GetInt(s, "speakers_per_group", spec.speakers_per_group));
  spec.utterances_per_speaker = static_cast<int>(
      ini.GetInt(s, "utterances_per_speaker", spec.utterances_per_speaker));
  spec.n_classes = static_cast<int>(ini.GetInt(s, "n_classes", spec.n_classes));
  spec.sample_rate =
      static_cast<int>(ini.GetInt(s, "sample_rate", spec.sample_rate));
  spec.duration_sec = ini.GetDouble(s, "duration_sec", spec.duration_sec);
  spec.f0_base_hz = ini.GetDouble(s, "f0_base_hz", spec.f0_base_hz);
  spec.age_scale_base = ini.GetDouble(s, "age_scale_base", spec.age_scale_base);
  spec.age_scale_step = ini.GetDouble(s, "age_scale_step", spec.age_scale_step);
  spec.speaker_jitter = ini.GetDouble(s, "speaker_jitter", spec.speaker_jitter);
  spec.utterance_jitter =
      ini.GetDouble(s, "utterance_jitter", spec.utterance_jitter);
  spec.noise_snr_db = ini.GetDouble(s, "noise_snr_db", spec.noise_snr_db);
  return spec;
}

SplitSpec ParseSplitSpec(const Ini& ini, const SplitSpec& defaults) {
  SplitSpec spec = defaults;
  spec.train = ini.GetDouble("split", "train", spec.train);
  spec.dev = ini.GetDouble("split", "dev", spec.dev);
  spec.test = ini.GetDouble("split", "test", spec.test);
  spec.seed = static_cast<uint64_t>(
      ini.GetInt("split", "seed", static_cast<int64_t>(spec.seed)));
  return spec;
}

FeatureConfig ParseFeatureConfig(const Ini& ini,
                                 const FeatureConfig& defaults) {
  FeatureConfig cfg = defaults;
  const std::string s = "features";
  cfg.n_mels = static_cast<int>(ini.GetInt(s, "n_mels", cfg.n_mels));
  cfg.n_fft = static_cast<int>(ini.GetInt(s, "n_fft", cfg.n_fft));
  cfg.sample_rate =
      static_cast<int>(ini.GetInt(s, "sample_rate", cfg.sample_rate));
  cfg.frame_shift_ms =
      static_cast<int>(ini.GetInt(s, "frame_shift_ms", cfg.frame_shift_ms));
  cfg.frame_length_ms =
      static_cast<int>(ini.GetInt(s, "frame_length_ms", cfg.frame_length_ms));
  cfg.preemphasis = ini.GetDouble(s, "preemphasis", cfg.preemphasis);
  cfg.floor_eps = ini.GetDouble(s, "floor_eps", cfg.floor_eps);
  cfg.mean_normalize = ini.GetBool(s, "mean_normalize", cfg.mean_normalize);
  cfg.stack = static_cast<int>(ini.GetInt(s, "stack", cfg.stack));
  return cfg;
}

ModelConfig ParseModelConfig(const Ini& ini, const ModelConfig& defaults) {
  ModelConfig cfg = defaults;
  const std::string s = "model";
  cfg.input_dim = static_cast<int>(ini.GetInt(s, "input_dim", cfg.input_dim));
  cfg.layers = static_cast<int>(ini.GetInt(s, "layers", cfg.layers));
  cfg.hidden = static_cast<int>(ini.GetInt(s, "hidden", cfg.hidden));
  cfg.bidirectional = ini.GetBool(s, "bidirectional", cfg.bidirectional);
  if (ini.Has(s, "cell")) {
    cfg.cell = ParseCellType(ini.GetString(s, "cell", ""));
  }
  cfg.n_classes = static_cast<int>(ini.GetInt(s, "n_classes", cfg.n_classes));
  return cfg;
}

MultiStepSchedule ParseSchedule(const Ini& ini, const std::string& section,
                                const MultiStepSchedule& defaults) {
  MultiStepSchedule sched = defaults;
  sched.lr_base = ini.GetDouble(section, "lr_base", sched.lr_base);
  sched.milestones = ini.GetIntList(section, "milestones", sched.milestones);
  sched.gamma = ini.GetDouble(section, "gamma", sched.gamma);
  return sched;
}

MetaConfig ParseMetaConfig(const Ini& ini, const MetaConfig& defaults) {
  MetaConfig cfg = defaults;
  cfg.features = ParseFeatureConfig(ini, cfg.features);
  ModelConfig model_defaults = cfg.model;
  model_defaults.input_dim = cfg.features.InputDim();
  cfg.model = ParseModelConfig(ini, model_defaults);

  const std::string s = "meta";
  cfg.inner_lr = ini.GetDouble(s, "inner_lr", cfg.inner_lr);
  cfg.inner_steps =
      static_cast<int>(ini.GetInt(s, "inner_steps", cfg.inner_steps));
  cfg.outer = ParseSchedule(ini, s, cfg.outer);
  cfg.episode_batch =
      static_cast<int>(ini.GetInt(s, "episode_batch", cfg.episode_batch));
  cfg.iterations = ini.GetInt(s, "iterations", cfg.iterations);
  cfg.tasks_per_step =
      static_cast<int>(ini.GetInt(s, "tasks_per_step", cfg.tasks_per_step));
  cfg.seed = static_cast<uint64_t>(
      ini.GetInt(s, "seed", static_cast<int64_t>(cfg.seed)));
  cfg.threads = static_cast<int>(ini.GetInt(s, "threads", cfg.threads));
  cfg.clip_norm = ini.GetDouble(s, "clip_norm", cfg.clip_norm);
  cfg.valid_every =
      static_cast<int>(ini.GetInt(s, "valid_every", cfg.valid_every));

  const std::string a = "augment";
  if (ini.Has(a, "method")) {
    cfg.augment.method = ParseAugmentMethod(ini.GetString(a, "method", ""));
  }
  cfg.augment.factors = ini.GetDoubleList(a, "factors", cfg.augment.factors);
  if (ini.Has(a, "mode")) {
    cfg.augment.mode = ParseAugMode(ini.GetString(a, "mode", ""));
  }
  return cfg;
}

AdaptConfig ParseAdaptConfig(const Ini& ini, const AdaptConfig& defaults) {
  AdaptConfig cfg = defaults;
  const std::string s = "adapt";
  cfg.epochs = static_cast<int>(ini.GetInt(s, "epochs", cfg.epochs));
  cfg.batch = static_cast<int>(ini.GetInt(s, "batch", cfg.batch));
  cfg.schedule = ParseSchedule(ini, s, cfg.schedule);
  if (ini.Has(s, "augment")) {
    cfg.augment = ParseAugmentMethod(ini.GetString(s, "augment", ""));
  }
  cfg.factors = ini.GetDoubleList(s, "factors", cfg.factors);
  cfg.spec_params.freq_mask_width_max = static_cast<int>(ini.GetInt(
      s, "freq_mask_width_max", cfg.spec_params.freq_mask_width_max));
  cfg.spec_params.freq_mask_count = static_cast<int>(
      ini.GetInt(s, "freq_mask_count", cfg.spec_params.freq_mask_count));
  cfg.spec_params.time_mask_width_max = static_cast<int>(ini.GetInt(
      s, "time_mask_width_max", cfg.spec_params.time_mask_width_max));
  cfg.spec_params.time_mask_count = static_cast<int>(
      ini.GetInt(s, "time_mask_count", cfg.spec_params.time_mask_count));
  cfg.seed = static_cast<uint64_t>(
      ini.GetInt(s, "seed", static_cast<int64_t>(cfg.seed)));
  cfg.clip_norm = ini.GetDouble(s, "clip_norm", cfg.clip_norm);
  return cfg;
}

ExperimentPlan ParseExperimentPlan(const Ini& ini) {
  ExperimentPlan plan = DefaultDeskPlan();
  plan.corpus = ParseSynthSpec(ini, plan.corpus);
  plan.corpus_seed = static_cast<uint64_t>(ini.GetInt(
      "corpus", "seed", static_cast<int64_t>(plan.corpus_seed)));
  plan.split = ParseSplitSpec(ini, plan.split);
  plan.meta = ParseMetaConfig(ini, plan.meta);
  plan.adapt = ParseAdaptConfig(ini, plan.adapt);

  const std::string h = "harness";
  if (ini.Has(h, "conditions")) {
    plan.conditions.clear();
    for (const std::string& name : ini.GetStringList(h, "conditions", {})) {
      plan.conditions.push_back(ParseCondition(name));
    }
  }
  if (ini.Has(h, "seeds")) {
    plan.seeds.clear();
    for (int64_t seed : ini.GetIntList(h, "seeds", {})) {
      plan.seeds.push_back(static_cast<uint64_t>(seed));
    }
  }
  plan.jobs = static_cast<int>(ini.GetInt(h, "jobs", plan.jobs));
  return plan;
}

AblationPlan ParseAblationPlan(const Ini& ini) {
  AblationPlan plan;
  plan.base = ParseExperimentPlan(ini);
  const std::string s = "ablation";
  if (ini.Has(s, "method")) {
    plan.method = ParseAugmentMethod(ini.GetString(s, "method", ""));
  }
  if (ini.Has(s, "orders")) {
    plan.orders.clear();
    for (const std::string& name : ini.GetStringList(s, "orders", {})) {
      plan.orders.push_back(ParseAblationOrder(name));
    }
  }
  if (ini.Has(s, "seeds")) {
    plan.seeds.clear();
    for (int64_t seed : ini.GetIntList(s, "seeds", {})) {
      plan.seeds.push_back(static_cast<uint64_t>(seed));
    }
  }
  plan.max_k = static_cast<int>(ini.GetInt(s, "max_k", plan.max_k));
  return plan;
}

ExperimentPlan LoadExperimentPlan(const std::string& path) {
  return ParseExperimentPlan(Ini::FromFile(path));
}

AblationPlan LoadAblationPlan(const std::string& path) {
  return ParseAblationPlan(Ini::FromFile(path));
}

}  // namespace mi
