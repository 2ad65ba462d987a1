// mi/meta.h  --  first-order meta-initialization training and adaptation
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

#ifndef MI_META_H_
#define MI_META_H_

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mi/augment.h"
#include "mi/model.h"
#include "mi/optim.h"
#include "mi/tasks.h"

namespace mi {

// A sampled (support, query) pair from one task. Support drives the
// inner-loop adaptation, query scores the adapted model in the outer loop.
struct Episode {
  LabeledBatch support;
  LabeledBatch query;
};

enum class AugMode { kNone, kTask, kRaw };

std::string AugModeName(AugMode mode);
AugMode ParseAugMode(const std::string& name);

// Warping augmentation during meta-training. kTask simulates new tasks per
// age (one factor drawn per task per iteration); kRaw merges warped copies
// into the original pools instead of forming new tasks. SpecAug is not a
// valid task/raw method: its random masks are not consistent across the data
// of one simulated task.
struct MetaAugmentConfig {
  AugmentMethod method = AugmentMethod::kNone;
  std::vector<double> factors = {0.9, 1.0, 1.1};
  AugMode mode = AugMode::kNone;
};

struct MetaConfig {
  ModelConfig model;
  FeatureConfig features;
  double inner_lr = 2e-4;  // alpha, fixed-lr inner SGD
  int inner_steps = 1;
  MultiStepSchedule outer = MetaOuterScheduleDefaults();  // beta schedule
  int episode_batch = 16;
  int64_t iterations = 6800;
  int tasks_per_step = 0;  // 0 = every task each iteration
  MetaAugmentConfig augment;
  uint64_t seed = 1;
  int threads = 1;
  double clip_norm = 0.0;  // 0 disables gradient-norm clipping
  int valid_every = 50;

  void Validate() const;
};

struct TrainLogEntry {
  int64_t iteration = 0;
  double meta_loss = 0.0;
  double valid_loss = 0.0;  // NaN when not computed this iteration
  double lr = 0.0;
};

struct TrainLog {
  std::vector<TrainLogEntry> entries;

  // CSV with header iteration,meta_loss,valid_loss,lr.
  void WriteCsv(const std::string& path) const;
};

// Draws 2 * batch_size distinct pool indices and splits them into support and
// query halves; the two sets are disjoint within the episode and every pool
// item can land in either role across draws.
std::pair<std::vector<int>, std::vector<int>> SampleEpisodeIds(int pool_size,
                                                               Rng& rng,
                                                               int batch_size);

// Materialized episode: features are fetched through the cache with the
// task's warp tag (or the entry's raw tag) applied.
Episode SampleEpisode(const Task& task, Rng& rng, int batch_size,
                      const Featurizer& featurizer, FeatureCache& cache);

// phi = theta after `steps` SGD steps on the support batch; theta is
// untouched. alpha = 0 returns theta exactly.
ParameterSet InnerAdapt(const Objective& objective, const ParameterSet& theta,
                        const LabeledBatch& support, double alpha, int steps);

// First-order meta-objective over episodes: the scalar is the sum of query
// losses at the adapted parameters phi_i; the gradient is the sum of query
// gradients evaluated at phi_i and applied directly to theta's schema (the
// Jacobian of phi w.r.t. theta is treated as identity). Episodes may be
// evaluated on several threads; accumulation is in fixed episode order so the
// result matches the single-threaded sum bit for bit.
std::pair<double, Gradients> MetaObjective(const Objective& objective,
                                           const ParameterSet& theta,
                                           const std::vector<Episode>& episodes,
                                           double alpha, int steps,
                                           int threads = 1);

struct OuterStepResult {
  ParameterSet params;
  AdamState adam;
  double meta_loss = 0.0;
};

// One Adam step on theta using MetaObjective gradients and the outer schedule
// at `iteration`.
OuterStepResult OuterStep(const Objective& objective, const ParameterSet& theta,
                          const AdamState& adam,
                          const std::vector<Episode>& episodes,
                          const MetaConfig& config, int64_t iteration);

// A copy of `task` whose features are computed under (method, factor).
TaskPtr MakeWarpedTask(const TaskPtr& task, AugmentMethod method,
                       double factor);

// Simulated-age task augmentation: every task gains one variant per factor,
// so |tasks'| = |tasks| * |factors|. Factor-1.0 variants alias the original
// task objects. Requires a warping method (SpecAug is rejected) and factors
// containing 1.0.
TaskList AugmentTasks(const TaskList& tasks, AugmentMethod method,
                      const std::vector<double>& factors);

// The Raw Aug control: warped copies join each task's pool (with derived
// utterance ids) instead of forming new tasks.
TaskList RawAugmentTasks(const TaskList& tasks, AugmentMethod method,
                         const std::vector<double>& factors);

using TrainObserver =
    std::function<void(int64_t iteration, const ParameterSet& theta)>;

// Meta-initialization training (first-order). Per iteration: pick each task
// group's variant (random warp when augment.mode == kTask), sample an
// episode per group with a per-(iteration, group) derived rng, take one
// outer Adam step. Validation loss on valid_task is logged every
// valid_every iterations. Returns theta after `iterations` steps plus the
// log. Single-threaded runs are bit-reproducible for a fixed (seed, config).
std::pair<ParameterSet, TrainLog> MetaTrain(const TaskList& tasks,
                                            const TaskPtr& valid_task,
                                            const MetaConfig& config,
                                            FeatureCache& cache,
                                            const TrainObserver& observer = {});

// Supervised pre-training baseline: identical batch composition (the query
// half of each sampled episode) and optimizer settings, but no inner loop.
// With inner_lr = 0 MetaTrain's parameter trajectory coincides with this one
// bit for bit.
std::pair<ParameterSet, TrainLog> SupervisedPretrain(
    const TaskList& tasks, const MetaConfig& config, FeatureCache& cache,
    const TrainObserver& observer = {});

// Adaptation-stage (fine-tuning) settings; epochs play the role of the
// scheduler's iterations.
struct AdaptConfig {
  int epochs = 15;
  int batch = 8;
  MultiStepSchedule schedule = AdaptScheduleDefaults();
  AugmentMethod augment = AugmentMethod::kNone;
  std::vector<double> factors = {0.9, 1.0, 1.1};
  SpecAugParams spec_params;
  uint64_t seed = 1;
  double clip_norm = 0.0;

  void Validate() const;
};

struct AdaptEpochStats {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double dev_frame_error = 0.0;
};

struct AdaptResult {
  ParameterSet params;  // best-on-dev parameters
  int best_epoch = -1;
  double best_dev_frame_error = 1.0;
  std::vector<AdaptEpochStats> epochs;
};

// Fine-tunes `init` on the target task's training split with Adam and the
// adaptation schedule, optionally augmenting each minibatch (SP/VTLP draw a
// factor per batch; SpecAug masks fresh every time). Keeps the parameters of
// the best dev-frame-error epoch.
AdaptResult FineTune(const RecurrentClassifier& model, const ParameterSet& init,
                     const std::vector<PoolEntry>& target_train,
                     const std::vector<PoolEntry>& target_dev,
                     const AdaptConfig& config, const Featurizer& featurizer,
                     FeatureCache& cache);

}  // namespace mi

#endif  // MI_META_H_
