// tools/metainit_main.cc  --  command line front end
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

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mi/config.h"
#include "mi/harness.h"
#include "mi/meta.h"
#include "mi/tasks.h"

namespace fs = std::filesystem;

namespace {

// Corpus and task assembly shared by the training subcommands: either load a
// manifest (with wav sources) or synthesize the configured corpus in memory.
mi::TaskSetup LoadTaskSetup(const mi::Ini& ini, const std::string& config_dir) {
  std::vector<mi::UtteranceRecord> records;
  std::string manifest = ini.GetString("data", "manifest", "");
  if (!manifest.empty()) {
    fs::path mp(manifest);
    if (mp.is_relative() && !config_dir.empty()) {
      mp = fs::path(config_dir) / mp;
    }
    records = mi::LoadManifest(mp.string());
    std::string audio_dir =
        ini.GetString("data", "audio_dir", mp.parent_path().string());
    mi::LoadManifestAudio(&records, audio_dir);
  } else {
    mi::SynthSpec spec = mi::ParseSynthSpec(ini, mi::SynthSpec{});
    mi::Rng rng(mi::MixSeed(
        static_cast<uint64_t>(ini.GetInt("corpus", "seed", 7))));
    records = mi::GenerateCorpus(spec, rng);
  }
  mi::CorpusSplits splits =
      mi::SplitCorpus(records, mi::ParseSplitSpec(ini, mi::SplitSpec{}));
  return mi::BuildTasks(splits);
}

int RunSynthTasks(const std::string& spec_path, const std::string& out_dir) {
  mi::Ini ini = spec_path.empty() ? mi::Ini::FromString("")
                                  : mi::Ini::FromFile(spec_path);
  mi::SynthSpec spec = mi::ParseSynthSpec(ini, mi::SynthSpec{});
  mi::Rng rng(
      mi::MixSeed(static_cast<uint64_t>(ini.GetInt("corpus", "seed", 7))));
  std::vector<mi::UtteranceRecord> records = mi::GenerateCorpus(spec, rng);

  fs::create_directories(fs::path(out_dir) / "wavs");
  for (auto& rec : records) {
    rec.source = "wavs/" + rec.utt_id + ".wav";
    mi::WriteWav((fs::path(out_dir) / rec.source).string(), *rec.audio);
  }
  mi::WriteManifest(records, (fs::path(out_dir) / "manifest.jsonl").string());
  std::cout << "wrote " << records.size() << " utterances to " << out_dir
            << "\n";
  return 0;
}

int RunFeaturize(const std::string& manifest, const std::string& out_dir,
                 double warp, int stack) {
  std::vector<mi::UtteranceRecord> records = mi::LoadManifest(manifest);
  mi::LoadManifestAudio(&records, fs::path(manifest).parent_path().string());
  mi::FeatureConfig config;
  config.stack = stack;
  if (!records.empty()) config.sample_rate = records[0].audio->sample_rate;
  mi::Featurizer featurizer(config);
  fs::create_directories(out_dir);
  for (const auto& rec : records) {
    mi::FeatureMatrix feats =
        warp == 1.0
            ? featurizer.Features(*rec.audio)
            : featurizer.Features(*rec.audio, mi::AugmentMethod::kVtlp, warp);
    mi::WriteFeatureFile((fs::path(out_dir) / (rec.utt_id + ".mifb")).string(),
                         feats);
  }
  std::cout << "featurized " << records.size() << " utterances into "
            << out_dir << "\n";
  return 0;
}

int RunAugmentCmd(const std::string& method_name, double factor,
                  const std::string& manifest, const std::string& out_dir,
                  uint64_t seed) {
  mi::AugmentMethod method = mi::ParseAugmentMethod(method_name);
  std::vector<mi::UtteranceRecord> records = mi::LoadManifest(manifest);
  mi::LoadManifestAudio(&records, fs::path(manifest).parent_path().string());
  mi::FeatureConfig config;
  if (!records.empty()) config.sample_rate = records[0].audio->sample_rate;
  mi::Featurizer featurizer(config);
  mi::Rng rng(mi::MixSeed(seed));
  fs::create_directories(out_dir);
  for (const auto& rec : records) {
    mi::FeatureMatrix feats;
    if (method == mi::AugmentMethod::kSpecAug) {
      mi::AugmentSpec spec;
      spec.method = method;
      feats = mi::ApplyAugment(featurizer.Features(*rec.audio), spec, rng);
    } else {
      mi::AugmentSpec spec;
      spec.method = method;
      spec.factor = factor;
      feats = mi::ApplyAugment(*rec.audio, spec, rng, featurizer);
    }
    mi::WriteFeatureFile((fs::path(out_dir) / (rec.utt_id + ".mifb")).string(),
                         feats);
  }
  std::cout << "augmented " << records.size() << " utterances into " << out_dir
            << "\n";
  return 0;
}

int RunMetaTrainCmd(const std::string& config_path, const std::string& out,
                    const std::string& log_path, bool pretrain) {
  mi::Ini ini = mi::Ini::FromFile(config_path);
  std::string config_dir = fs::path(config_path).parent_path().string();
  mi::TaskSetup setup = LoadTaskSetup(ini, config_dir);
  mi::MetaConfig config =
      mi::ParseMetaConfig(ini, mi::DefaultDeskPlan().meta);

  mi::TaskList tasks = setup.training;
  if (!pretrain && config.augment.mode == mi::AugMode::kTask) {
    tasks = mi::AugmentTasks(tasks, config.augment.method,
                             config.augment.factors);
  }
  mi::FeatureCache cache;
  auto [theta, log] =
      pretrain ? mi::SupervisedPretrain(tasks, config, cache)
               : mi::MetaTrain(tasks, setup.validation, config, cache);
  mi::SaveCheckpoint(out, config.model, theta);
  if (!log_path.empty()) log.WriteCsv(log_path);
  if (!log.entries.empty()) {
    const auto& last = log.entries.back();
    std::cout << "final iteration " << last.iteration << " loss "
              << last.meta_loss << " lr " << last.lr << "\n";
  }
  std::cout << "checkpoint written to " << out << "\n";
  return 0;
}

int RunAdaptCmd(const std::string& init_path, const std::string& config_path,
                const std::string& out) {
  mi::Ini ini = mi::Ini::FromFile(config_path);
  std::string config_dir = fs::path(config_path).parent_path().string();
  mi::TaskSetup setup = LoadTaskSetup(ini, config_dir);
  auto [model_config, init] = mi::LoadCheckpoint(init_path);
  mi::RecurrentClassifier model(model_config);
  mi::AdaptConfig config = mi::ParseAdaptConfig(ini, mi::AdaptConfig{});
  mi::FeatureConfig feat_config =
      mi::ParseFeatureConfig(ini, mi::FeatureConfig{});
  mi::Featurizer featurizer(feat_config);
  mi::FeatureCache train_cache, eval_cache;

  mi::AdaptResult result =
      mi::FineTune(model, init, setup.target.train, setup.target.dev, config,
                   featurizer, train_cache);
  mi::EvalMetrics dev = mi::Evaluate(model, result.params, setup.target.dev,
                                     featurizer, eval_cache);
  mi::EvalMetrics test = mi::Evaluate(model, result.params, setup.target.test,
                                      featurizer, eval_cache);
  if (!out.empty()) mi::SaveCheckpoint(out, model_config, result.params);

  std::printf("best epoch %d\n", result.best_epoch);
  std::printf("dev : frame_error %.4f  ce %.4f\n", dev.frame_error,
              dev.mean_cross_entropy);
  std::printf("test: frame_error %.4f  utt_error %.4f  ce %.4f\n",
              test.frame_error, test.utterance_error, test.mean_cross_entropy);
  return 0;
}

int RunMatrixCmd(const std::string& plan_path, const std::string& out) {
  mi::ExperimentPlan plan = plan_path.empty()
                                ? mi::DefaultDeskPlan()
                                : mi::LoadExperimentPlan(plan_path);
  mi::ExperimentReport report = mi::RunMatrix(plan);
  mi::WriteReportCsv(report, out);
  for (const auto& agg : report.aggregates) {
    std::printf("%-18s cells=%d test_fer %.4f +- %.4f\n",
                mi::ConditionName(agg.condition).c_str(), agg.cells,
                agg.test_frame_error_mean, agg.test_frame_error_stddev);
  }
  std::cout << "report written to " << out << "\n";
  return report.AnyFailed() ? 1 : 0;
}

int RunAblationCmd(const std::string& plan_path, const std::string& order,
                   const std::string& out) {
  mi::AblationPlan plan;
  if (!plan_path.empty()) {
    plan = mi::LoadAblationPlan(plan_path);
  } else {
    plan.base = mi::DefaultDeskPlan();
  }
  if (order == "forward") {
    plan.orders = {mi::AblationOrder::kForward};
  } else if (order == "reverse") {
    plan.orders = {mi::AblationOrder::kReverse};
  } else if (order == "both") {
    plan.orders = {mi::AblationOrder::kForward, mi::AblationOrder::kReverse};
  } else {
    throw std::invalid_argument("--order must be forward, reverse or both");
  }
  std::vector<mi::AblationPoint> points = mi::RunAblation(plan);
  mi::WriteAblationCsv(points, out);
  bool any_failed = false;
  for (const auto& p : points) any_failed |= p.failed;
  std::cout << "curve written to " << out << "\n";
  return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meta-initialization toolkit for age-grouped acoustic tasks"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, manifest, method, config_path, init_path;
  std::string plan_path, out_path, log_path, order = "both";
  double warp = 1.0, factor = 1.0;
  int stack = 1;
  uint64_t seed = 1;

  auto* synth = app.add_subcommand("synth-tasks", "synthesize the corpus");
  synth->add_option("--spec", spec_path, "corpus config file");
  synth->add_option("--out", out_dir, "output directory")->required();

  auto* featurize = app.add_subcommand("featurize", "waveforms to features");
  featurize->add_option("--manifest", manifest)->required();
  featurize->add_option("--out-dir", out_dir)->required();
  featurize->add_option("--warp", warp, "VTLP warp factor");
  featurize->add_option("--stack", stack, "frames appended per frame");

  auto* augment = app.add_subcommand("augment", "augmented featurization");
  augment->add_option("--method", method, "sp|vtlp|specaug")->required();
  augment->add_option("--factor", factor, "warp factor");
  augment->add_option("--in", manifest, "input manifest")->required();
  augment->add_option("--out-dir", out_dir)->required();
  augment->add_option("--seed", seed, "rng seed");

  auto* meta_train = app.add_subcommand("meta-train", "train the MI model");
  meta_train->add_option("--config", config_path)->required();
  meta_train->add_option("--out", out_path, "checkpoint path")->required();
  meta_train->add_option("--log", log_path, "training log CSV");

  auto* pretrain = app.add_subcommand("pretrain", "supervised pre-training");
  pretrain->add_option("--config", config_path)->required();
  pretrain->add_option("--out", out_path, "checkpoint path")->required();
  pretrain->add_option("--log", log_path, "training log CSV");

  auto* adapt = app.add_subcommand("adapt", "fine-tune on the target task");
  adapt->add_option("--init", init_path, "initialization checkpoint")
      ->required();
  adapt->add_option("--config", config_path)->required();
  adapt->add_option("--out", out_path, "adapted checkpoint path");

  auto* matrix = app.add_subcommand("run-matrix", "full comparison matrix");
  matrix->add_option("--plan", plan_path, "plan config file");
  matrix->add_option("--out", out_path, "report CSV")->required();

  auto* ablation =
      app.add_subcommand("run-ablation", "incremental task augmentation");
  ablation->add_option("--plan", plan_path, "plan config file");
  ablation->add_option("--order", order, "forward|reverse|both");
  ablation->add_option("--out", out_path, "curve CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return RunSynthTasks(spec_path, out_dir);
    if (featurize->parsed()) return RunFeaturize(manifest, out_dir, warp, stack);
    if (augment->parsed())
      return RunAugmentCmd(method, factor, manifest, out_dir, seed);
    if (meta_train->parsed())
      return RunMetaTrainCmd(config_path, out_path, log_path, false);
    if (pretrain->parsed())
      return RunMetaTrainCmd(config_path, out_path, log_path, true);
    if (adapt->parsed()) return RunAdaptCmd(init_path, config_path, out_path);
    if (matrix->parsed()) return RunMatrixCmd(plan_path, out_path);
    if (ablation->parsed()) return RunAblationCmd(plan_path, order, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
