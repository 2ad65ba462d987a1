// mi/model.h  --  recurrent frame classifier with exact reverse-mode gradients
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

#ifndef MI_MODEL_H_
#define MI_MODEL_H_

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mi {

enum class CellType { kSimpleRnn, kLstm };

std::string CellTypeName(CellType cell);
CellType ParseCellType(const std::string& name);

struct ModelConfig {
  int input_dim = 160;
  int layers = 2;
  int hidden = 32;
  bool bidirectional = true;
  CellType cell = CellType::kLstm;
  int n_classes = 5;

  int Directions() const { return bidirectional ? 2 : 1; }
  void Validate() const;
};

// Named collection of real tensors. Parameter sets, gradients and optimizer
// moments all share this type; two sets from the same config have identical
// schemas (same names, same shapes) and combine element-wise.
class ParameterSet {
 public:
  using Map = std::map<std::string, Eigen::MatrixXd>;

  Eigen::MatrixXd& Insert(const std::string& name, int rows, int cols);
  Eigen::MatrixXd& At(const std::string& name);
  const Eigen::MatrixXd& At(const std::string& name) const;

  size_t Size() const { return tensors_.size(); }
  bool Empty() const { return tensors_.empty(); }
  Map::iterator begin() { return tensors_.begin(); }
  Map::iterator end() { return tensors_.end(); }
  Map::const_iterator begin() const { return tensors_.begin(); }
  Map::const_iterator end() const { return tensors_.end(); }

  bool SameSchema(const ParameterSet& other) const;
  void CheckSameSchema(const ParameterSet& other) const;

  // All-zero set with this set's schema.
  ParameterSet ZerosLike() const;

  void AddScaled(const ParameterSet& other, double scale);  // in place
  double SquaredNorm() const;
  bool AllFinite() const;
  bool BitIdentical(const ParameterSet& other) const;

 private:
  Map tensors_;
};

using Gradients = ParameterSet;

// params + scale * gradients, as a fresh set; inputs are untouched.
ParameterSet Axpy(const ParameterSet& params, const Gradients& gradients,
                  double scale);

// Split provenance carried by batch items so training paths can refuse
// held-out data.
enum class SplitRole { kTrain, kDev, kTest };

// A batch of variable-length utterances with per-frame labels.
struct LabeledBatch {
  std::vector<Eigen::MatrixXd> features;   // each T_i x D
  std::vector<std::vector<int>> labels;    // per-frame class ids, length T_i
  std::vector<SplitRole> provenance;       // optional; parallel to features
  std::vector<std::string> utt_ids;        // optional; parallel to features

  size_t NumUtterances() const { return features.size(); }
  int64_t TotalFrames() const;
  void Add(Eigen::MatrixXd feats, std::vector<int> frame_labels,
           SplitRole role = SplitRole::kTrain, std::string utt_id = "");
};

std::vector<int> BroadcastLabel(int class_id, int num_frames);

// Anything the meta trainer can differentiate: a scalar loss over a batch and
// its exact gradient with respect to the parameter set.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double Loss(const ParameterSet& params,
                      const LabeledBatch& batch) const = 0;
  virtual std::pair<double, Gradients> LossAndGrad(
      const ParameterSet& params, const LabeledBatch& batch) const = 0;
};

// Stacked (optionally bidirectional) SimpleRNN/LSTM layers plus a linear
// output projection with log-softmax. Arithmetic is 64-bit throughout and all
// entry points are pure: the same inputs give bit-identical outputs, so
// batches may be evaluated concurrently against one ParameterSet.
//
// The loss is the mean negative log-probability of the true class over every
// frame in the batch; LossAndGrad backpropagates through the full utterance
// (backpropagation through time) and returns gradients on the parameter
// schema. Loss() and the loss returned by LossAndGrad() take the same code
// path and agree bit-for-bit.
class RecurrentClassifier : public Objective {
 public:
  explicit RecurrentClassifier(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases;
  // deterministic given the seed.
  ParameterSet InitParams(uint64_t seed) const;

  // Per-utterance T x n_classes log-probability matrices.
  std::vector<Eigen::MatrixXd> Forward(const ParameterSet& params,
                                       const LabeledBatch& batch) const;

  double Loss(const ParameterSet& params,
              const LabeledBatch& batch) const override;
  std::pair<double, Gradients> LossAndGrad(
      const ParameterSet& params, const LabeledBatch& batch) const override;

 private:
  ModelConfig config_;
};

// Classification quality of a parameter set on a batch.
struct EvalMetrics {
  double frame_error = 0.0;       // 1 - mean per-frame argmax accuracy
  double utterance_error = 0.0;   // 1 - mean majority-vote accuracy
  double mean_cross_entropy = 0.0;
  int64_t frames = 0;
  int64_t utterances = 0;
};

// Argmax ties resolve to the smallest class id; the utterance-level vote uses
// the per-frame argmax classes against the utterance's first-frame label.
EvalMetrics ComputeMetrics(const RecurrentClassifier& model,
                           const ParameterSet& params,
                           const LabeledBatch& batch);

// Checkpoints: magic "MICK", version u32, config block, then named tensors
// (u32 name length, name bytes, u32 rows, u32 cols, row-major f64 values).
// Round trips are bit-exact.
void SaveCheckpoint(const std::string& path, const ModelConfig& config,
                    const ParameterSet& params);
std::pair<ModelConfig, ParameterSet> LoadCheckpoint(const std::string& path);

}  // namespace mi

#endif  // MI_MODEL_H_
