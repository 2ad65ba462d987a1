// core/src/meta.cc
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

#include "mi/meta.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace mi {

namespace {

// Salts for the derived rng streams; per-(iteration, group) derivation keeps
// sampling independent of execution order.
constexpr uint64_t kSaltTaskSelect = 0xa1;
constexpr uint64_t kSaltVariant = 0xa2;
constexpr uint64_t kSaltEpisode = 0xa3;
constexpr uint64_t kSaltValidation = 0xa4;
constexpr uint64_t kSaltAdaptShuffle = 0xa5;
constexpr uint64_t kSaltAdaptAugment = 0xa6;

bool IsWarpingMethod(AugmentMethod method) {
  return method == AugmentMethod::kSpeedPerturb ||
         method == AugmentMethod::kVtlp;
}

void ValidateWarpFactors(const std::vector<double>& factors) {
  Require(!factors.empty(), "augment factors must not be empty");
  bool has_identity = false;
  for (size_t i = 0; i < factors.size(); ++i) {
    Require(factors[i] >= kMinWarpFactor && factors[i] <= kMaxWarpFactor,
            "augment factor outside [0.5, 2.0]");
    if (factors[i] == 1.0) has_identity = true;
    for (size_t j = i + 1; j < factors.size(); ++j) {
      Require(factors[i] != factors[j], "duplicate augment factor");
    }
  }
  Require(has_identity, "augment factors must include 1.0");
}

void CheckPoolProvenance(const std::vector<PoolEntry>& pool,
                         const std::string& what) {
  for (const auto& entry : pool) {
    Require(entry.provenance != SplitRole::kTest,
            what + ": pool contains test-split utterance " + entry.utt_id);
    Require(entry.audio != nullptr,
            what + ": pool entry " + entry.utt_id + " has no audio");
  }
}

}  // namespace

std::string AugModeName(AugMode mode) {
  switch (mode) {
    case AugMode::kNone: return "none";
    case AugMode::kTask: return "task";
    case AugMode::kRaw: return "raw";
  }
  return "none";
}

AugMode ParseAugMode(const std::string& name) {
  if (name == "none") return AugMode::kNone;
  if (name == "task") return AugMode::kTask;
  if (name == "raw") return AugMode::kRaw;
  throw std::invalid_argument("unknown augmentation mode: " + name);
}

void MetaConfig::Validate() const {
  model.Validate();
  outer.Validate();
  Require(inner_lr >= 0.0, "MetaConfig: inner_lr must be >= 0");
  Require(inner_steps >= 1, "MetaConfig: inner_steps must be >= 1");
  Require(episode_batch >= 1, "MetaConfig: episode_batch must be >= 1");
  Require(iterations >= 0, "MetaConfig: iterations must be >= 0");
  Require(tasks_per_step >= 0, "MetaConfig: tasks_per_step must be >= 0");
  Require(threads >= 1, "MetaConfig: threads must be >= 1");
  Require(clip_norm >= 0.0, "MetaConfig: clip_norm must be >= 0");
  Require(valid_every >= 1, "MetaConfig: valid_every must be >= 1");
  if (augment.mode != AugMode::kNone) {
    Require(IsWarpingMethod(augment.method),
            "MetaConfig: task/raw augmentation requires a warping method "
            "(SpecAug masks are not consistent within a simulated task)");
    ValidateWarpFactors(augment.factors);
  }
}

void TrainLog::WriteCsv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("TrainLog: cannot open " + path);
  os << "iteration,meta_loss,valid_loss,lr\n";
  for (const auto& e : entries) {
    os << e.iteration << "," << e.meta_loss << ",";
    if (std::isnan(e.valid_loss)) {
      os << "";
    } else {
      os << e.valid_loss;
    }
    os << "," << e.lr << "\n";
  }
}

std::pair<std::vector<int>, std::vector<int>> SampleEpisodeIds(int pool_size,
                                                               Rng& rng,
                                                               int batch_size) {
  Require(batch_size >= 1, "SampleEpisodeIds: batch_size must be >= 1");
  if (pool_size < 2 * batch_size) {
    throw std::invalid_argument(
        "SampleEpisodeIds: pool too small for disjoint support/query (" +
        std::to_string(pool_size) + " < 2*" + std::to_string(batch_size) + ")");
  }
  std::vector<int> ids = SampleWithoutReplacement(rng, pool_size, 2 * batch_size);
  std::vector<int> support(ids.begin(), ids.begin() + batch_size);
  std::vector<int> query(ids.begin() + batch_size, ids.end());
  return {std::move(support), std::move(query)};
}

namespace {

void AppendPoolEntry(LabeledBatch* batch, const Task& task,
                     const PoolEntry& entry, const Featurizer& featurizer,
                     FeatureCache& cache) {
  AugmentMethod method = entry.method;
  double factor = entry.factor;
  if (task.tag.has_value()) {
    method = task.tag->method;
    factor = task.tag->factor;
  }
  auto feats = cache.Get(entry.cache_id, method, factor, *entry.audio,
                         featurizer);
  batch->Add(feats->frames,
             BroadcastLabel(entry.label, feats->NumFrames()),
             entry.provenance, entry.utt_id);
}

}  // namespace

Episode SampleEpisode(const Task& task, Rng& rng, int batch_size,
                      const Featurizer& featurizer, FeatureCache& cache) {
  auto [support_ids, query_ids] =
      SampleEpisodeIds(static_cast<int>(task.pool.size()), rng, batch_size);
  Episode episode;
  for (int idx : support_ids) {
    AppendPoolEntry(&episode.support, task, task.pool[idx], featurizer, cache);
  }
  for (int idx : query_ids) {
    AppendPoolEntry(&episode.query, task, task.pool[idx], featurizer, cache);
  }
  return episode;
}

ParameterSet InnerAdapt(const Objective& objective, const ParameterSet& theta,
                        const LabeledBatch& support, double alpha, int steps) {
  Require(steps >= 1, "InnerAdapt: steps must be >= 1");
  Require(alpha >= 0.0, "InnerAdapt: alpha must be >= 0");
  ParameterSet phi = theta;
  for (int s = 0; s < steps; ++s) {
    auto [loss, grads] = objective.LossAndGrad(phi, support);
    (void)loss;
    phi.AddScaled(grads, -alpha);
  }
  return phi;
}

namespace {

// Shared by MetaObjective and the pre-training baseline: per-episode query
// loss/gradient at phi (inner-adapted when use_inner). Parallel evaluation
// with fixed-order accumulation, so thread count never changes the result
// bits.
std::pair<double, Gradients> EpisodeLossAndGrads(
    const Objective& objective, const ParameterSet& theta,
    const std::vector<Episode>& episodes, double alpha, int steps, int threads,
    bool use_inner) {
  Require(!episodes.empty(), "MetaObjective: need at least one episode");
  std::vector<double> losses(episodes.size());
  std::vector<Gradients> grads(episodes.size());
  std::vector<std::exception_ptr> errors(episodes.size());
  ParallelFor(static_cast<int>(episodes.size()), threads, [&](int i) {
    try {
      const Episode& ep = episodes[i];
      if (use_inner) {
        ParameterSet phi = InnerAdapt(objective, theta, ep.support, alpha,
                                      steps);
        std::tie(losses[i], grads[i]) = objective.LossAndGrad(phi, ep.query);
      } else {
        std::tie(losses[i], grads[i]) = objective.LossAndGrad(theta, ep.query);
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  double total = 0.0;
  Gradients sum = theta.ZerosLike();
  for (size_t i = 0; i < episodes.size(); ++i) {
    total += losses[i];
    sum.AddScaled(grads[i], 1.0);
  }
  return {total, std::move(sum)};
}

void ClipGradNorm(Gradients* grads, double max_norm) {
  if (max_norm <= 0.0) return;
  double norm = std::sqrt(grads->SquaredNorm());
  if (norm > max_norm) {
    double scale = max_norm / norm;
    for (auto& [name, tensor] : *grads) tensor *= scale;
  }
}

}  // namespace

std::pair<double, Gradients> MetaObjective(const Objective& objective,
                                           const ParameterSet& theta,
                                           const std::vector<Episode>& episodes,
                                           double alpha, int steps,
                                           int threads) {
  return EpisodeLossAndGrads(objective, theta, episodes, alpha, steps, threads,
                             /*use_inner=*/true);
}

OuterStepResult OuterStep(const Objective& objective,
                          const ParameterSet& theta, const AdamState& adam,
                          const std::vector<Episode>& episodes,
                          const MetaConfig& config, int64_t iteration) {
  Require(iteration >= 0, "OuterStep: iteration must be >= 0");
  double lr = ScheduleLr(config.outer, iteration);
  auto [loss, grads] =
      MetaObjective(objective, theta, episodes, config.inner_lr,
                    config.inner_steps, config.threads);
  ClipGradNorm(&grads, config.clip_norm);
  auto [next_adam, next_theta] = AdamStep(adam, theta, grads, lr);
  return {std::move(next_theta), std::move(next_adam), loss};
}

TaskPtr MakeWarpedTask(const TaskPtr& task, AugmentMethod method,
                       double factor) {
  Require(task != nullptr, "MakeWarpedTask: null task");
  Require(IsWarpingMethod(method),
          "MakeWarpedTask: method must be speed perturbation or VTLP");
  auto warped = std::make_shared<Task>(*task);
  warped->tag = AugmentTag{method, factor};
  return warped;
}

TaskList AugmentTasks(const TaskList& tasks, AugmentMethod method,
                      const std::vector<double>& factors) {
  Require(!tasks.empty(), "AugmentTasks: empty task list");
  if (!IsWarpingMethod(method)) {
    throw std::invalid_argument(
        "AugmentTasks: SpecAug (or none) is not usable for task augmentation; "
        "random masks are not consistent across the data of one task");
  }
  ValidateWarpFactors(factors);
  TaskList out;
  out.reserve(tasks.size() * factors.size());
  for (const auto& task : tasks) {
    Require(task != nullptr && !task->tag.has_value(),
            "AugmentTasks: input tasks must be originals");
    for (double f : factors) {
      if (f == 1.0) {
        out.push_back(task);  // alias, not a copy
      } else {
        out.push_back(MakeWarpedTask(task, method, f));
      }
    }
  }
  return out;
}

TaskList RawAugmentTasks(const TaskList& tasks, AugmentMethod method,
                         const std::vector<double>& factors) {
  Require(!tasks.empty(), "RawAugmentTasks: empty task list");
  Require(IsWarpingMethod(method),
          "RawAugmentTasks: requires a warping method");
  ValidateWarpFactors(factors);
  TaskList out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) {
    auto merged = std::make_shared<Task>();
    merged->base_id = task->base_id;
    merged->pool.reserve(task->pool.size() * factors.size());
    for (double f : factors) {
      for (const PoolEntry& entry : task->pool) {
        PoolEntry copy = entry;
        if (f != 1.0) {
          copy.method = method;
          copy.factor = f;
          std::ostringstream id;
          id << entry.utt_id << "#" << AugmentMethodName(method) << f;
          copy.utt_id = id.str();
        }
        merged->pool.push_back(std::move(copy));
      }
    }
    out.push_back(std::move(merged));
  }
  return out;
}

namespace {

// Tasks grouped by age, variants in canonical order (original first, then by
// ascending factor). The canonical ordering makes runs independent of the
// order augmented variants were appended in.
std::vector<std::vector<TaskPtr>> GroupTasksByBase(const TaskList& tasks) {
  std::map<int, std::vector<TaskPtr>> by_age;
  for (const auto& task : tasks) {
    Require(task != nullptr, "training task list contains null task");
    Require(!task->pool.empty(), "task " + task->Id() + " has an empty pool");
    by_age[AgeGroupIndex(task->base_id)].push_back(task);
  }
  std::vector<std::vector<TaskPtr>> groups;
  groups.reserve(by_age.size());
  for (auto& [age, variants] : by_age) {
    std::sort(variants.begin(), variants.end(),
              [](const TaskPtr& a, const TaskPtr& b) {
                bool a_tagged = a->tag.has_value();
                bool b_tagged = b->tag.has_value();
                if (a_tagged != b_tagged) return !a_tagged;
                if (!a_tagged) return false;
                return a->tag->factor < b->tag->factor;
              });
    groups.push_back(std::move(variants));
  }
  return groups;
}

std::pair<ParameterSet, TrainLog> TrainLoop(const TaskList& tasks,
                                            const TaskPtr& valid_task,
                                            const MetaConfig& config,
                                            FeatureCache& cache,
                                            const TrainObserver& observer,
                                            bool use_inner) {
  config.Validate();
  Require(!tasks.empty(), "training requires at least one task");

  RecurrentClassifier model(config.model);
  Featurizer featurizer(config.features);

  TaskList work = tasks;
  if (config.augment.mode == AugMode::kRaw) {
    work = RawAugmentTasks(tasks, config.augment.method,
                           config.augment.factors);
  }
  for (const auto& task : work) {
    CheckPoolProvenance(task->pool, "training task " + task->Id());
  }
  std::vector<std::vector<TaskPtr>> groups = GroupTasksByBase(work);
  if (valid_task != nullptr) {
    CheckPoolProvenance(valid_task->pool, "validation task");
    for (const auto& group : groups) {
      Require(group[0]->base_id != valid_task->base_id,
              "validation task must be excluded from training tasks");
    }
  }

  ParameterSet theta = model.InitParams(config.seed);
  AdamState adam = AdamState::Init(theta);
  TrainLog log;
  log.entries.reserve(static_cast<size_t>(config.iterations));

  int n_groups = static_cast<int>(groups.size());
  for (int64_t iter = 0; iter < config.iterations; ++iter) {
    // Which age groups participate this iteration.
    std::vector<int> selected;
    if (config.tasks_per_step > 0 && config.tasks_per_step < n_groups) {
      Rng sel_rng(MixSeed(config.seed, kSaltTaskSelect, iter));
      selected = SampleWithoutReplacement(sel_rng, n_groups,
                                          config.tasks_per_step);
      std::sort(selected.begin(), selected.end());
    } else {
      selected.resize(n_groups);
      for (int i = 0; i < n_groups; ++i) selected[i] = i;
    }

    std::vector<Episode> episodes;
    episodes.reserve(selected.size());
    for (int gi : selected) {
      const auto& variants = groups[gi];
      const Task* chosen = variants[0].get();
      if (config.augment.mode == AugMode::kTask && variants.size() > 1) {
        Rng variant_rng(MixSeed(config.seed, kSaltVariant, iter, gi));
        chosen = variants[RandInt(variant_rng, 0,
                                  static_cast<int64_t>(variants.size()) - 1)]
                     .get();
      }
      Rng episode_rng(MixSeed(config.seed, kSaltEpisode, iter, gi));
      episodes.push_back(SampleEpisode(*chosen, episode_rng,
                                       config.episode_batch, featurizer,
                                       cache));
    }

    double lr = ScheduleLr(config.outer, iter);
    auto [meta_loss, grads] =
        EpisodeLossAndGrads(model, theta, episodes, config.inner_lr,
                            config.inner_steps, config.threads, use_inner);
    ClipGradNorm(&grads, config.clip_norm);
    auto [next_adam, next_theta] = AdamStep(adam, theta, grads, lr);
    adam = std::move(next_adam);
    theta = std::move(next_theta);

    double valid_loss = std::numeric_limits<double>::quiet_NaN();
    if (valid_task != nullptr &&
        (iter % config.valid_every == 0 || iter + 1 == config.iterations)) {
      Rng valid_rng(MixSeed(config.seed, kSaltValidation, iter));
      Episode vep = SampleEpisode(*valid_task, valid_rng, config.episode_batch,
                                  featurizer, cache);
      if (use_inner) {
        ParameterSet phi = InnerAdapt(model, theta, vep.support,
                                      config.inner_lr, config.inner_steps);
        valid_loss = model.Loss(phi, vep.query);
      } else {
        valid_loss = model.Loss(theta, vep.query);
      }
    }
    log.entries.push_back({iter, meta_loss, valid_loss, lr});
    if (observer) observer(iter, theta);
  }
  return {std::move(theta), std::move(log)};
}

}  // namespace

std::pair<ParameterSet, TrainLog> MetaTrain(const TaskList& tasks,
                                            const TaskPtr& valid_task,
                                            const MetaConfig& config,
                                            FeatureCache& cache,
                                            const TrainObserver& observer) {
  return TrainLoop(tasks, valid_task, config, cache, observer,
                   /*use_inner=*/true);
}

std::pair<ParameterSet, TrainLog> SupervisedPretrain(
    const TaskList& tasks, const MetaConfig& config, FeatureCache& cache,
    const TrainObserver& observer) {
  return TrainLoop(tasks, nullptr, config, cache, observer,
                   /*use_inner=*/false);
}

void AdaptConfig::Validate() const {
  schedule.Validate();
  Require(epochs >= 1, "AdaptConfig: epochs must be >= 1");
  Require(batch >= 1, "AdaptConfig: batch must be >= 1");
  Require(clip_norm >= 0.0, "AdaptConfig: clip_norm must be >= 0");
  if (augment == AugmentMethod::kSpeedPerturb ||
      augment == AugmentMethod::kVtlp) {
    ValidateWarpFactors(factors);
  }
}

AdaptResult FineTune(const RecurrentClassifier& model,
                     const ParameterSet& init,
                     const std::vector<PoolEntry>& target_train,
                     const std::vector<PoolEntry>& target_dev,
                     const AdaptConfig& config, const Featurizer& featurizer,
                     FeatureCache& cache) {
  config.Validate();
  Require(!target_train.empty(), "FineTune: empty target training split");
  Require(!target_dev.empty(), "FineTune: empty target dev split");
  CheckPoolProvenance(target_train, "FineTune train");
  CheckPoolProvenance(target_dev, "FineTune dev");

  auto plain_batch = [&](const std::vector<PoolEntry>& pool) {
    LabeledBatch batch;
    for (const auto& entry : pool) {
      auto feats = cache.Get(entry.cache_id, AugmentMethod::kNone, 1.0,
                             *entry.audio, featurizer);
      batch.Add(feats->frames, BroadcastLabel(entry.label, feats->NumFrames()),
                entry.provenance, entry.utt_id);
    }
    return batch;
  };
  LabeledBatch dev_batch = plain_batch(target_dev);

  ParameterSet theta = init;
  AdamState adam = AdamState::Init(theta);
  AdaptResult result;

  int n = static_cast<int>(target_train.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double lr = ScheduleLr(config.schedule, epoch);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng shuffle_rng(MixSeed(config.seed, kSaltAdaptShuffle, epoch));
    for (int i = n - 1; i > 0; --i) {
      int j = static_cast<int>(RandInt(shuffle_rng, 0, i));
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    int batch_count = 0;
    for (int start = 0; start < n; start += config.batch) {
      int end = std::min(n, start + config.batch);
      Rng aug_rng(MixSeed(config.seed, kSaltAdaptAugment, epoch, batch_count));
      AugmentMethod method = config.augment;
      double factor = 1.0;
      if (method == AugmentMethod::kSpeedPerturb ||
          method == AugmentMethod::kVtlp) {
        factor = config.factors[RandInt(
            aug_rng, 0, static_cast<int64_t>(config.factors.size()) - 1)];
      }

      LabeledBatch batch;
      for (int i = start; i < end; ++i) {
        const PoolEntry& entry = target_train[order[i]];
        if (method == AugmentMethod::kSpecAug) {
          auto base = cache.Get(entry.cache_id, AugmentMethod::kNone, 1.0,
                                *entry.audio, featurizer);
          FeatureMatrix masked =
              SpecAugment(*base, aug_rng, config.spec_params);
          batch.Add(masked.frames,
                    BroadcastLabel(entry.label, masked.NumFrames()),
                    entry.provenance, entry.utt_id);
        } else {
          auto feats = cache.Get(entry.cache_id, method, factor, *entry.audio,
                                 featurizer);
          batch.Add(feats->frames,
                    BroadcastLabel(entry.label, feats->NumFrames()),
                    entry.provenance, entry.utt_id);
        }
      }

      auto [loss, grads] = model.LossAndGrad(theta, batch);
      ClipGradNorm(&grads, config.clip_norm);
      auto [next_adam, next_theta] = AdamStep(adam, theta, grads, lr);
      adam = std::move(next_adam);
      theta = std::move(next_theta);
      loss_sum += loss;
      ++batch_count;
    }

    double dev_fer = ComputeMetrics(model, theta, dev_batch).frame_error;
    result.epochs.push_back(
        {epoch, lr, loss_sum / std::max(batch_count, 1), dev_fer});
    if (result.best_epoch < 0 || dev_fer < result.best_dev_frame_error) {
      result.best_epoch = epoch;
      result.best_dev_frame_error = dev_fer;
      result.params = theta;
    }
  }
  return result;
}

}  // namespace mi
