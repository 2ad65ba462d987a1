// core/src/harness.cc
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

#include "mi/harness.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mi {

std::string ConditionName(Condition condition) {
  switch (condition) {
    case Condition::kBaseline: return "baseline";
    case Condition::kDataAugSp: return "data_aug_sp";
    case Condition::kDataAugVtlp: return "data_aug_vtlp";
    case Condition::kSpt: return "spt";
    case Condition::kMi: return "mi";
    case Condition::kMiRawAugSp: return "mi_raw_aug_sp";
    case Condition::kMiRawAugVtlp: return "mi_raw_aug_vtlp";
    case Condition::kMiTaskAugSp: return "mi_task_aug_sp";
    case Condition::kMiTaskAugVtlp: return "mi_task_aug_vtlp";
  }
  return "baseline";
}

Condition ParseCondition(const std::string& name) {
  for (Condition c : AllConditions()) {
    if (ConditionName(c) == name) return c;
  }
  throw std::invalid_argument("unknown condition: " + name);
}

std::vector<Condition> AllConditions() {
  return {Condition::kBaseline,     Condition::kDataAugSp,
          Condition::kDataAugVtlp,  Condition::kSpt,
          Condition::kMi,           Condition::kMiRawAugSp,
          Condition::kMiRawAugVtlp, Condition::kMiTaskAugSp,
          Condition::kMiTaskAugVtlp};
}

void ExperimentPlan::Validate() const {
  Require(!conditions.empty(), "ExperimentPlan: no conditions");
  Require(!seeds.empty(), "ExperimentPlan: no seeds");
  corpus.Validate();
  split.Validate();
  meta.Validate();
  adapt.Validate();
  Require(jobs >= 0, "ExperimentPlan: jobs must be >= 0");
}

ExperimentPlan DefaultDeskPlan() {
  ExperimentPlan plan;
  plan.corpus = SynthSpec{};
  plan.corpus_seed = 7;
  plan.split = SplitSpec{};

  plan.meta.features = FeatureConfig{};
  plan.meta.model.input_dim = plan.meta.features.InputDim();
  plan.meta.model.layers = 1;
  plan.meta.model.hidden = 16;
  plan.meta.model.bidirectional = true;
  plan.meta.model.cell = CellType::kLstm;
  plan.meta.model.n_classes = plan.corpus.n_classes;

  // Desk-scale training budget: far fewer outer iterations than the
  // full-scale recipe, compensated by a larger outer learning rate.
  plan.meta.inner_lr = 1e-2;
  plan.meta.inner_steps = 1;
  plan.meta.episode_batch = 4;
  plan.meta.iterations = 150;
  plan.meta.outer = MultiStepSchedule{3e-3, {100}, 0.15};
  plan.meta.valid_every = 25;

  plan.adapt = AdaptConfig{};
  return plan;
}

bool ExperimentReport::AnyFailed() const {
  for (const auto& cell : cells) {
    if (cell.failed) return true;
  }
  return false;
}

std::vector<double> ExperimentReport::TestFrameErrors(
    Condition condition) const {
  std::vector<double> out;
  for (const auto& cell : cells) {
    if (cell.condition == condition && !cell.failed) {
      out.push_back(cell.test_frame_error);
    }
  }
  return out;
}

namespace {

struct SharedSetup {
  TaskSetup tasks;
  Featurizer featurizer;
  FeatureCache train_cache;  // touched by MI/SPT/fine-tune paths only
  FeatureCache eval_cache;   // touched by Evaluate only

  explicit SharedSetup(const FeatureConfig& features) : featurizer(features) {}
};

CellResult RunCell(Condition condition, uint64_t seed,
                   const ExperimentPlan& plan, SharedSetup* shared) {
  CellResult cell;
  cell.condition = condition;
  cell.seed = seed;
  try {
    RecurrentClassifier model(plan.meta.model);
    MetaConfig meta_cfg = plan.meta;
    meta_cfg.seed = seed;
    AdaptConfig adapt_cfg = plan.adapt;
    adapt_cfg.seed = seed;

    const TaskSetup& setup = shared->tasks;
    ParameterSet init;
    switch (condition) {
      case Condition::kBaseline:
        init = model.InitParams(seed);
        break;
      case Condition::kDataAugSp:
        init = model.InitParams(seed);
        adapt_cfg.augment = AugmentMethod::kSpeedPerturb;
        break;
      case Condition::kDataAugVtlp:
        init = model.InitParams(seed);
        adapt_cfg.augment = AugmentMethod::kVtlp;
        break;
      case Condition::kSpt:
        meta_cfg.augment.mode = AugMode::kNone;
        init = SupervisedPretrain(setup.training, meta_cfg,
                                  shared->train_cache)
                   .first;
        break;
      case Condition::kMi:
        meta_cfg.augment.mode = AugMode::kNone;
        init = MetaTrain(setup.training, setup.validation, meta_cfg,
                         shared->train_cache)
                   .first;
        break;
      case Condition::kMiRawAugSp:
      case Condition::kMiRawAugVtlp:
        meta_cfg.augment.mode = AugMode::kRaw;
        meta_cfg.augment.method = condition == Condition::kMiRawAugSp
                                      ? AugmentMethod::kSpeedPerturb
                                      : AugmentMethod::kVtlp;
        init = MetaTrain(setup.training, setup.validation, meta_cfg,
                         shared->train_cache)
                   .first;
        break;
      case Condition::kMiTaskAugSp:
      case Condition::kMiTaskAugVtlp: {
        meta_cfg.augment.mode = AugMode::kTask;
        meta_cfg.augment.method = condition == Condition::kMiTaskAugSp
                                      ? AugmentMethod::kSpeedPerturb
                                      : AugmentMethod::kVtlp;
        TaskList augmented = AugmentTasks(
            setup.training, meta_cfg.augment.method, meta_cfg.augment.factors);
        init = MetaTrain(augmented, setup.validation, meta_cfg,
                         shared->train_cache)
                   .first;
        break;
      }
    }

    AdaptResult adapted =
        FineTune(model, init, setup.target.train, setup.target.dev, adapt_cfg,
                 shared->featurizer, shared->train_cache);
    EvalMetrics dev = Evaluate(model, adapted.params, setup.target.dev,
                               shared->featurizer, shared->eval_cache);
    EvalMetrics test = Evaluate(model, adapted.params, setup.target.test,
                                shared->featurizer, shared->eval_cache);
    cell.dev_frame_error = dev.frame_error;
    cell.dev_cross_entropy = dev.mean_cross_entropy;
    cell.test_frame_error = test.frame_error;
    cell.test_utterance_error = test.utterance_error;
    cell.test_cross_entropy = test.mean_cross_entropy;
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  return cell;
}

void CheckTestIsolation(const SharedSetup& shared) {
  std::set<std::string> touched = shared.train_cache.TouchedUttIds();
  for (const auto& entry : shared.tasks.target.test) {
    Require(touched.count(entry.cache_id) == 0,
            "test-split utterance " + entry.cache_id +
                " was featurized by a training path");
  }
}

}  // namespace

std::vector<ConditionAggregate> ComputeAggregates(
    const std::vector<CellResult>& cells) {
  std::vector<Condition> order;
  for (const auto& cell : cells) {
    if (std::find(order.begin(), order.end(), cell.condition) == order.end()) {
      order.push_back(cell.condition);
    }
  }
  std::vector<ConditionAggregate> aggregates;
  for (Condition condition : order) {
    ConditionAggregate agg;
    agg.condition = condition;
    std::vector<double> dev, test;
    for (const auto& cell : cells) {
      if (cell.condition != condition || cell.failed) continue;
      dev.push_back(cell.dev_frame_error);
      test.push_back(cell.test_frame_error);
    }
    agg.cells = static_cast<int>(test.size());
    auto mean = [](const std::vector<double>& v) {
      if (v.empty()) return 0.0;
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    auto stddev = [&mean](const std::vector<double>& v) {
      if (v.size() < 2) return 0.0;
      double m = mean(v);
      double s = 0.0;
      for (double x : v) s += (x - m) * (x - m);
      return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    agg.dev_frame_error_mean = mean(dev);
    agg.dev_frame_error_stddev = stddev(dev);
    agg.test_frame_error_mean = mean(test);
    agg.test_frame_error_stddev = stddev(test);
    aggregates.push_back(agg);
  }
  return aggregates;
}

ExperimentReport RunMatrix(const ExperimentPlan& plan) {
  plan.Validate();

  Rng corpus_rng(MixSeed(plan.corpus_seed));
  std::vector<UtteranceRecord> records = GenerateCorpus(plan.corpus, corpus_rng);
  CorpusSplits splits = SplitCorpus(records, plan.split);

  SharedSetup shared(plan.meta.features);
  shared.tasks = BuildTasks(splits);

  struct Job {
    Condition condition;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Condition condition : plan.conditions) {
    for (uint64_t seed : plan.seeds) {
      jobs.push_back({condition, seed});
    }
  }

  ExperimentReport report;
  report.cells.resize(jobs.size());
  int workers = plan.jobs > 0 ? plan.jobs : EnvThreadCap("MI_THREADS");
  ParallelFor(static_cast<int>(jobs.size()), workers, [&](int j) {
    report.cells[j] = RunCell(jobs[j].condition, jobs[j].seed, plan, &shared);
  });

  CheckTestIsolation(shared);
  report.aggregates = ComputeAggregates(report.cells);
  return report;
}

namespace {

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void WriteReportCsv(const ExperimentReport& report, const std::string& path) {
  std::vector<std::string> header = {"condition", "seed",     "status",
                                     "dev_fer",   "dev_ce",   "test_fer",
                                     "test_uer",  "test_ce",  "error"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& cell : report.cells) {
    rows.push_back({ConditionName(cell.condition), std::to_string(cell.seed),
                    cell.failed ? "failed" : "ok",
                    FormatDouble(cell.dev_frame_error),
                    FormatDouble(cell.dev_cross_entropy),
                    FormatDouble(cell.test_frame_error),
                    FormatDouble(cell.test_utterance_error),
                    FormatDouble(cell.test_cross_entropy), cell.error});
  }
  for (const auto& agg : report.aggregates) {
    rows.push_back({ConditionName(agg.condition), "mean", "aggregate",
                    FormatDouble(agg.dev_frame_error_mean), "",
                    FormatDouble(agg.test_frame_error_mean), "", "", ""});
    rows.push_back({ConditionName(agg.condition), "stddev", "aggregate",
                    FormatDouble(agg.dev_frame_error_stddev), "",
                    FormatDouble(agg.test_frame_error_stddev), "", "", ""});
  }
  EmitPlotData(header, rows, path);
}

std::string AblationOrderName(AblationOrder order) {
  return order == AblationOrder::kForward ? "forward" : "reverse";
}

AblationOrder ParseAblationOrder(const std::string& name) {
  if (name == "forward") return AblationOrder::kForward;
  if (name == "reverse") return AblationOrder::kReverse;
  throw std::invalid_argument("unknown ablation order: " + name);
}

std::vector<AblationPoint> RunAblation(const AblationPlan& plan) {
  plan.base.Validate();
  Require(plan.method == AugmentMethod::kSpeedPerturb ||
              plan.method == AugmentMethod::kVtlp,
          "RunAblation: method must be a warping method");
  Require(!plan.orders.empty() && !plan.seeds.empty(),
          "RunAblation: empty orders or seeds");

  Rng corpus_rng(MixSeed(plan.base.corpus_seed));
  std::vector<UtteranceRecord> records =
      GenerateCorpus(plan.base.corpus, corpus_rng);
  CorpusSplits splits = SplitCorpus(records, plan.base.split);

  SharedSetup shared(plan.base.meta.features);
  shared.tasks = BuildTasks(splits);

  int n_groups = static_cast<int>(shared.tasks.training.size());
  int max_k = plan.max_k < 0 ? n_groups : std::min(plan.max_k, n_groups);

  struct Job {
    AblationOrder order;
    int k;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (AblationOrder order : plan.orders) {
    for (int k = 0; k <= max_k; ++k) {
      for (uint64_t seed : plan.seeds) {
        jobs.push_back({order, k, seed});
      }
    }
  }

  std::vector<AblationPoint> points(jobs.size());
  int workers =
      plan.base.jobs > 0 ? plan.base.jobs : EnvThreadCap("MI_THREADS");
  ParallelFor(static_cast<int>(jobs.size()), workers, [&](int j) {
    AblationPoint& point = points[j];
    point.order = jobs[j].order;
    point.k = jobs[j].k;
    point.seed = jobs[j].seed;
    try {
      // Training tasks are in ascending age order; forward augments from the
      // youngest training group, reverse from the oldest.
      std::vector<TaskPtr> ordered = shared.tasks.training;
      if (point.order == AblationOrder::kReverse) {
        std::reverse(ordered.begin(), ordered.end());
      }
      TaskList tasks = shared.tasks.training;
      MetaConfig meta_cfg = plan.base.meta;
      meta_cfg.seed = point.seed;
      meta_cfg.augment.mode = AugMode::kTask;
      meta_cfg.augment.method = plan.method;
      for (int g = 0; g < point.k; ++g) {
        for (double f : meta_cfg.augment.factors) {
          if (f != 1.0) {
            tasks.push_back(MakeWarpedTask(ordered[g], plan.method, f));
          }
        }
      }

      RecurrentClassifier model(meta_cfg.model);
      ParameterSet init = MetaTrain(tasks, shared.tasks.validation, meta_cfg,
                                    shared.train_cache)
                              .first;
      AdaptConfig adapt_cfg = plan.base.adapt;
      adapt_cfg.seed = point.seed;
      AdaptResult adapted = FineTune(model, init, shared.tasks.target.train,
                                     shared.tasks.target.dev, adapt_cfg,
                                     shared.featurizer, shared.train_cache);
      point.dev_frame_error =
          Evaluate(model, adapted.params, shared.tasks.target.dev,
                   shared.featurizer, shared.eval_cache)
              .frame_error;
      point.test_frame_error =
          Evaluate(model, adapted.params, shared.tasks.target.test,
                   shared.featurizer, shared.eval_cache)
              .frame_error;
    } catch (const std::exception& e) {
      point.failed = true;
      point.error = e.what();
    }
  });

  CheckTestIsolation(shared);
  return points;
}

void WriteAblationCsv(const std::vector<AblationPoint>& points,
                      const std::string& path) {
  std::vector<std::string> header = {"order", "k", "seed", "dev", "test"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& point : points) {
    rows.push_back({AblationOrderName(point.order), std::to_string(point.k),
                    std::to_string(point.seed),
                    point.failed ? "" : FormatDouble(point.dev_frame_error),
                    point.failed ? "" : FormatDouble(point.test_frame_error)});
  }
  EmitPlotData(header, rows, path);
}

EvalMetrics Evaluate(const RecurrentClassifier& model,
                     const ParameterSet& params,
                     const std::vector<PoolEntry>& split,
                     const Featurizer& featurizer, FeatureCache& cache) {
  Require(!split.empty(), "Evaluate: empty split");
  LabeledBatch batch;
  for (const auto& entry : split) {
    auto feats = cache.Get(entry.cache_id, AugmentMethod::kNone, 1.0,
                           *entry.audio, featurizer);
    batch.Add(feats->frames, BroadcastLabel(entry.label, feats->NumFrames()),
              entry.provenance, entry.utt_id);
  }
  return ComputeMetrics(model, params, batch);
}

void EmitPlotData(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows,
                  const std::string& path) {
  Require(!header.empty(), "EmitPlotData: empty header");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("EmitPlotData: cannot open " + path);
  auto write_row = [&os](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i > 0) os << ",";
      os << CsvEscape(row[i]);
    }
    os << "\n";
  };
  write_row(header);
  for (const auto& row : rows) {
    Require(row.size() == header.size(),
            "EmitPlotData: row width does not match header");
    write_row(row);
  }
  if (!os) throw std::runtime_error("EmitPlotData: write failed " + path);
}

}  // namespace mi
