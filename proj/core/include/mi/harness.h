// mi/harness.h  --  experiment matrix, incremental-task ablation, reporting
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

#ifndef MI_HARNESS_H_
#define MI_HARNESS_H_

#include <string>
#include <vector>

#include "mi/meta.h"
#include "mi/tasks.h"

namespace mi {

// One row of the comparison matrix. The MI rows differ only in how the
// meta-training tasks are augmented; the DataAug rows augment the adaptation
// stage of a randomly initialized model.
enum class Condition {
  kBaseline,
  kDataAugSp,
  kDataAugVtlp,
  kSpt,
  kMi,
  kMiRawAugSp,
  kMiRawAugVtlp,
  kMiTaskAugSp,
  kMiTaskAugVtlp,
};

std::string ConditionName(Condition condition);
Condition ParseCondition(const std::string& name);
std::vector<Condition> AllConditions();

struct ExperimentPlan {
  std::vector<Condition> conditions = AllConditions();
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  SynthSpec corpus;
  uint64_t corpus_seed = 7;
  SplitSpec split;
  MetaConfig meta;    // meta.model / meta.features are the shared configs
  AdaptConfig adapt;
  int jobs = 0;  // 0: hardware threads capped by MI_THREADS

  void Validate() const;
};

// Desk-scale defaults sized so the full default matrix finishes inside its
// runtime budget on a small machine while still separating the conditions.
ExperimentPlan DefaultDeskPlan();

struct CellResult {
  Condition condition = Condition::kBaseline;
  uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double dev_frame_error = 0.0;
  double dev_cross_entropy = 0.0;
  double test_frame_error = 0.0;
  double test_utterance_error = 0.0;
  double test_cross_entropy = 0.0;
};

struct ConditionAggregate {
  Condition condition = Condition::kBaseline;
  int cells = 0;  // non-failed cells aggregated
  double dev_frame_error_mean = 0.0;
  double dev_frame_error_stddev = 0.0;
  double test_frame_error_mean = 0.0;
  double test_frame_error_stddev = 0.0;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::vector<ConditionAggregate> aggregates;

  bool AnyFailed() const;
  std::vector<double> TestFrameErrors(Condition condition) const;
};

// Runs every (condition, seed) cell end to end: init, optional MI/SPT
// pre-training, fine-tuning, evaluation on the target test split. Cells run
// in parallel (MI_THREADS caps workers), each internally deterministic; a
// failing cell is recorded and the matrix continues. Training paths and
// evaluation use separate feature caches so held-out isolation stays
// checkable.
ExperimentReport RunMatrix(const ExperimentPlan& plan);

// Aggregates recomputed from the given cells (mean and sample stddev over
// non-failed cells, per condition, in first-appearance order).
std::vector<ConditionAggregate> ComputeAggregates(
    const std::vector<CellResult>& cells);

// Cells plus aggregate rows (seed column "mean"/"stddev"), CSV.
void WriteReportCsv(const ExperimentReport& report, const std::string& path);

enum class AblationOrder { kForward, kReverse };

std::string AblationOrderName(AblationOrder order);
AblationOrder ParseAblationOrder(const std::string& name);

// Incremental task augmentation: for k = 0..n_training_groups, augment the
// first k groups in age order (forward: youngest training group first;
// reverse: oldest first) and run the MI + fine-tune pipeline.
struct AblationPlan {
  ExperimentPlan base;  // corpus and config shared with the matrix
  AugmentMethod method = AugmentMethod::kSpeedPerturb;
  std::vector<AblationOrder> orders = {AblationOrder::kForward,
                                       AblationOrder::kReverse};
  std::vector<uint64_t> seeds = {1, 2};
  int max_k = -1;  // -1: all training groups
};

struct AblationPoint {
  AblationOrder order = AblationOrder::kForward;
  int k = 0;
  uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double dev_frame_error = 0.0;
  double test_frame_error = 0.0;
};

std::vector<AblationPoint> RunAblation(const AblationPlan& plan);

// CSV with header order,k,seed,dev,test.
void WriteAblationCsv(const std::vector<AblationPoint>& points,
                      const std::string& path);

// Frame/utterance error rate and mean cross-entropy of `params` on a split.
EvalMetrics Evaluate(const RecurrentClassifier& model,
                     const ParameterSet& params,
                     const std::vector<PoolEntry>& split,
                     const Featurizer& featurizer, FeatureCache& cache);

// Generic tabular plot-data emission (CSV); header size must match each row.
void EmitPlotData(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows,
                  const std::string& path);

}  // namespace mi

#endif  // MI_HARNESS_H_
