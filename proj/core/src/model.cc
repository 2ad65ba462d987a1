// core/src/model.cc
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

#include "mi/model.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mi/common.h"

namespace mi {

std::string CellTypeName(CellType cell) {
  return cell == CellType::kLstm ? "lstm" : "rnn";
}

CellType ParseCellType(const std::string& name) {
  if (name == "lstm") return CellType::kLstm;
  if (name == "rnn" || name == "simple_rnn") return CellType::kSimpleRnn;
  throw std::invalid_argument("unknown cell type: " + name);
}

void ModelConfig::Validate() const {
  Require(input_dim >= 1, "ModelConfig: input_dim must be >= 1");
  Require(layers >= 1, "ModelConfig: layers must be >= 1");
  Require(hidden >= 1, "ModelConfig: hidden must be >= 1");
  Require(n_classes >= 1, "ModelConfig: n_classes must be >= 1");
}

Eigen::MatrixXd& ParameterSet::Insert(const std::string& name, int rows,
                                      int cols) {
  auto [it, inserted] =
      tensors_.emplace(name, Eigen::MatrixXd::Zero(rows, cols));
  Require(inserted, "ParameterSet: duplicate tensor name " + name);
  return it->second;
}

Eigen::MatrixXd& ParameterSet::At(const std::string& name) {
  auto it = tensors_.find(name);
  Require(it != tensors_.end(), "ParameterSet: missing tensor " + name);
  return it->second;
}

const Eigen::MatrixXd& ParameterSet::At(const std::string& name) const {
  auto it = tensors_.find(name);
  Require(it != tensors_.end(), "ParameterSet: missing tensor " + name);
  return it->second;
}

bool ParameterSet::SameSchema(const ParameterSet& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  auto a = tensors_.begin();
  auto b = other.tensors_.begin();
  for (; a != tensors_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.rows() != b->second.rows() ||
        a->second.cols() != b->second.cols()) {
      return false;
    }
  }
  return true;
}

void ParameterSet::CheckSameSchema(const ParameterSet& other) const {
  Require(SameSchema(other), "ParameterSet: schema mismatch");
}

ParameterSet ParameterSet::ZerosLike() const {
  ParameterSet out;
  for (const auto& [name, tensor] : tensors_) {
    out.Insert(name, static_cast<int>(tensor.rows()),
               static_cast<int>(tensor.cols()));
  }
  return out;
}

void ParameterSet::AddScaled(const ParameterSet& other, double scale) {
  CheckSameSchema(other);
  auto a = tensors_.begin();
  auto b = other.tensors_.begin();
  for (; a != tensors_.end(); ++a, ++b) {
    a->second += scale * b->second;
  }
}

double ParameterSet::SquaredNorm() const {
  double acc = 0.0;
  for (const auto& [name, tensor] : tensors_) acc += tensor.squaredNorm();
  return acc;
}

bool ParameterSet::AllFinite() const {
  for (const auto& [name, tensor] : tensors_) {
    if (!tensor.allFinite()) return false;
  }
  return true;
}

bool ParameterSet::BitIdentical(const ParameterSet& other) const {
  if (!SameSchema(other)) return false;
  auto a = tensors_.begin();
  auto b = other.tensors_.begin();
  for (; a != tensors_.end(); ++a, ++b) {
    if (std::memcmp(a->second.data(), b->second.data(),
                    sizeof(double) * a->second.size()) != 0) {
      return false;
    }
  }
  return true;
}

ParameterSet Axpy(const ParameterSet& params, const Gradients& gradients,
                  double scale) {
  params.CheckSameSchema(gradients);
  ParameterSet out = params;
  out.AddScaled(gradients, scale);
  return out;
}

int64_t LabeledBatch::TotalFrames() const {
  int64_t total = 0;
  for (const auto& f : features) total += f.rows();
  return total;
}

void LabeledBatch::Add(Eigen::MatrixXd feats, std::vector<int> frame_labels,
                       SplitRole role, std::string utt_id) {
  Require(static_cast<size_t>(feats.rows()) == frame_labels.size(),
          "LabeledBatch: label length must equal frame count");
  features.push_back(std::move(feats));
  labels.push_back(std::move(frame_labels));
  provenance.push_back(role);
  utt_ids.push_back(std::move(utt_id));
}

std::vector<int> BroadcastLabel(int class_id, int num_frames) {
  Require(num_frames >= 1, "BroadcastLabel: need at least one frame");
  return std::vector<int>(num_frames, class_id);
}

namespace {

constexpr char kDirChar[2] = {'f', 'b'};

std::string TensorName(int layer, int dir, const char* what) {
  return "l" + std::to_string(layer) + "." + kDirChar[dir] + "." + what;
}

int GatesPerCell(CellType cell) { return cell == CellType::kLstm ? 4 : 1; }

Eigen::MatrixXd Sigmoid(const Eigen::MatrixXd& x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

// Forward/backward state for one direction of one layer over a group of
// equal-length utterances; step index s runs in processing order (reversed
// time for the backward direction).
struct DirCache {
  std::vector<Eigen::MatrixXd> h;                // per step, H x B
  std::vector<Eigen::MatrixXd> gi, gf, gg, go;   // LSTM gates per step
  std::vector<Eigen::MatrixXd> c;                // LSTM cell state per step
};

struct LayerCache {
  std::vector<Eigen::MatrixXd> input;  // per time index, D x (B)
  std::vector<DirCache> dirs;
};

}  // namespace

RecurrentClassifier::RecurrentClassifier(const ModelConfig& config)
    : config_(config) {
  config_.Validate();
}

ParameterSet RecurrentClassifier::InitParams(uint64_t seed) const {
  Rng rng(MixSeed(seed));
  auto fill_uniform = [&rng](Eigen::MatrixXd& m) {
    double bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
    for (int r = 0; r < m.rows(); ++r) {
      for (int c = 0; c < m.cols(); ++c) {
        m(r, c) = RandRange(rng, -bound, bound);
      }
    }
  };

  ParameterSet params;
  int gates = GatesPerCell(config_.cell);
  int dirs = config_.Directions();
  for (int l = 0; l < config_.layers; ++l) {
    int in_dim = l == 0 ? config_.input_dim : config_.hidden * dirs;
    for (int d = 0; d < dirs; ++d) {
      fill_uniform(params.Insert(TensorName(l, d, "w_ih"),
                                 gates * config_.hidden, in_dim));
      fill_uniform(params.Insert(TensorName(l, d, "w_hh"),
                                 gates * config_.hidden, config_.hidden));
      params.Insert(TensorName(l, d, "b"), gates * config_.hidden, 1);
    }
  }
  fill_uniform(
      params.Insert("out.w", config_.n_classes, config_.hidden * dirs));
  params.Insert("out.b", config_.n_classes, 1);
  return params;
}

namespace {

// Runs loss (and optionally gradients / per-utterance log-probs) for one
// group of same-length utterances. Returns the summed negative log-likelihood
// over the group's frames; gradient contributions are scaled by
// inv_total_frames and accumulated into *grads.
double RunGroup(const ModelConfig& cfg, const ParameterSet& params,
                const LabeledBatch& batch, const std::vector<int>& utt_idx,
                double inv_total_frames, Gradients* grads,
                std::vector<Eigen::MatrixXd>* logprobs) {
  const int T = static_cast<int>(batch.features[utt_idx[0]].rows());
  const int B = static_cast<int>(utt_idx.size());
  const int H = cfg.hidden;
  const int dirs = cfg.Directions();
  const int gates = GatesPerCell(cfg.cell);
  const bool lstm = cfg.cell == CellType::kLstm;

  // Assemble the layer-0 input sequence: D x B per time index.
  std::vector<LayerCache> layers(cfg.layers);
  layers[0].input.resize(T);
  for (int t = 0; t < T; ++t) {
    layers[0].input[t].resize(cfg.input_dim, B);
    for (int b = 0; b < B; ++b) {
      layers[0].input[t].col(b) =
          batch.features[utt_idx[b]].row(t).transpose();
    }
  }

  // Forward through the stack.
  for (int l = 0; l < cfg.layers; ++l) {
    LayerCache& lc = layers[l];
    const int in_dim = static_cast<int>(lc.input[0].rows());
    lc.dirs.resize(dirs);

    // One big GEMM for the input contribution of all steps.
    Eigen::MatrixXd all_x(in_dim, static_cast<int64_t>(T) * B);
    for (int t = 0; t < T; ++t) all_x.middleCols(t * B, B) = lc.input[t];

    for (int d = 0; d < dirs; ++d) {
      const Eigen::MatrixXd& w_ih = params.At(TensorName(l, d, "w_ih"));
      const Eigen::MatrixXd& w_hh = params.At(TensorName(l, d, "w_hh"));
      const Eigen::MatrixXd& bias = params.At(TensorName(l, d, "b"));
      Require(w_ih.cols() == in_dim,
              "RecurrentClassifier: feature dim does not match config");

      Eigen::MatrixXd ih = w_ih * all_x;  // gates*H x T*B
      DirCache& dc = lc.dirs[d];
      dc.h.resize(T);
      if (lstm) {
        dc.gi.resize(T);
        dc.gf.resize(T);
        dc.gg.resize(T);
        dc.go.resize(T);
        dc.c.resize(T);
      }
      Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(H, B);
      Eigen::MatrixXd c_prev = Eigen::MatrixXd::Zero(H, B);
      for (int s = 0; s < T; ++s) {
        int t = d == 0 ? s : T - 1 - s;
        Eigen::MatrixXd pre = ih.middleCols(t * B, B) + w_hh * h_prev;
        pre.colwise() += bias.col(0);
        if (lstm) {
          dc.gi[s] = Sigmoid(pre.middleRows(0, H));
          dc.gf[s] = Sigmoid(pre.middleRows(H, H));
          dc.gg[s] = pre.middleRows(2 * H, H).array().tanh().matrix();
          dc.go[s] = Sigmoid(pre.middleRows(3 * H, H));
          dc.c[s] = dc.gf[s].cwiseProduct(c_prev) +
                    dc.gi[s].cwiseProduct(dc.gg[s]);
          dc.h[s] = dc.go[s].cwiseProduct(dc.c[s].array().tanh().matrix());
          c_prev = dc.c[s];
        } else {
          dc.h[s] = pre.array().tanh().matrix();
        }
        h_prev = dc.h[s];
      }
    }

    // Concatenated per-time output feeds the next layer.
    if (l + 1 < cfg.layers) {
      layers[l + 1].input.resize(T);
      for (int t = 0; t < T; ++t) {
        Eigen::MatrixXd& top = layers[l + 1].input[t];
        top.resize(H * dirs, B);
        for (int d = 0; d < dirs; ++d) {
          int s = d == 0 ? t : T - 1 - t;
          top.middleRows(d * H, H) = layers[l].dirs[d].h[s];
        }
      }
    }
  }

  // Top features per time index.
  auto top_at = [&](int t) {
    Eigen::MatrixXd top(H * dirs, B);
    for (int d = 0; d < dirs; ++d) {
      int s = d == 0 ? t : T - 1 - t;
      top.middleRows(d * H, H) = layers[cfg.layers - 1].dirs[d].h[s];
    }
    return top;
  };

  const Eigen::MatrixXd& out_w = params.At("out.w");
  const Eigen::MatrixXd& out_b = params.At("out.b");

  if (logprobs != nullptr) {
    for (int b = 0; b < B; ++b) {
      (*logprobs)[utt_idx[b]].resize(T, cfg.n_classes);
    }
  }

  double nll = 0.0;
  std::vector<Eigen::MatrixXd> dlogits;  // per t, C x B; only for gradients
  if (grads != nullptr) dlogits.resize(T);

  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd logits = out_w * top_at(t);
    logits.colwise() += out_b.col(0);
    Eigen::RowVectorXd mx = logits.colwise().maxCoeff();
    Eigen::RowVectorXd lse =
        mx + (logits.rowwise() - mx).array().exp().colwise().sum().log()
                 .matrix();
    Eigen::MatrixXd logp = logits.rowwise() - lse;

    for (int b = 0; b < B; ++b) {
      int label = batch.labels[utt_idx[b]][t];
      Require(label >= 0 && label < cfg.n_classes,
              "RecurrentClassifier: label out of range");
      nll -= logp(label, b);
      if (logprobs != nullptr) {
        (*logprobs)[utt_idx[b]].row(t) = logp.col(b).transpose();
      }
    }
    if (grads != nullptr) {
      Eigen::MatrixXd dl = logp.array().exp().matrix();
      for (int b = 0; b < B; ++b) {
        dl(batch.labels[utt_idx[b]][t], b) -= 1.0;
      }
      dlogits[t] = dl * inv_total_frames;
    }
  }

  if (grads == nullptr) return nll;

  // Output projection gradients and the gradient flowing into the top layer.
  Eigen::MatrixXd& g_out_w = grads->At("out.w");
  Eigen::MatrixXd& g_out_b = grads->At("out.b");
  std::vector<Eigen::MatrixXd> dtop(T);
  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd top = top_at(t);
    g_out_w.noalias() += dlogits[t] * top.transpose();
    g_out_b.col(0) += dlogits[t].rowwise().sum();
    dtop[t] = out_w.transpose() * dlogits[t];
  }

  // Backpropagation through time, top layer down.
  for (int l = cfg.layers - 1; l >= 0; --l) {
    const LayerCache& lc = layers[l];
    const int in_dim = static_cast<int>(lc.input[0].rows());
    std::vector<Eigen::MatrixXd> dinput;
    if (l > 0) {
      dinput.assign(T, Eigen::MatrixXd::Zero(in_dim, B));
    }
    for (int d = 0; d < dirs; ++d) {
      const DirCache& dc = lc.dirs[d];
      const Eigen::MatrixXd& w_ih = params.At(TensorName(l, d, "w_ih"));
      const Eigen::MatrixXd& w_hh = params.At(TensorName(l, d, "w_hh"));
      Eigen::MatrixXd& g_w_ih = grads->At(TensorName(l, d, "w_ih"));
      Eigen::MatrixXd& g_w_hh = grads->At(TensorName(l, d, "w_hh"));
      Eigen::MatrixXd& g_b = grads->At(TensorName(l, d, "b"));

      Eigen::MatrixXd all_da(gates * H, static_cast<int64_t>(T) * B);
      Eigen::MatrixXd dh_carry = Eigen::MatrixXd::Zero(H, B);
      Eigen::MatrixXd dc_carry = Eigen::MatrixXd::Zero(H, B);
      for (int s = T - 1; s >= 0; --s) {
        int t = d == 0 ? s : T - 1 - s;
        Eigen::MatrixXd dh = dtop[t].middleRows(d * H, H) + dh_carry;
        Eigen::MatrixXd da(gates * H, B);
        if (lstm) {
          const Eigen::MatrixXd& gi = dc.gi[s];
          const Eigen::MatrixXd& gf = dc.gf[s];
          const Eigen::MatrixXd& gg = dc.gg[s];
          const Eigen::MatrixXd& go = dc.go[s];
          Eigen::MatrixXd tc = dc.c[s].array().tanh().matrix();
          Eigen::MatrixXd dcell =
              dc_carry +
              dh.cwiseProduct(go).cwiseProduct(
                  (1.0 - tc.array().square()).matrix());
          Eigen::MatrixXd c_prev = s > 0
                                       ? dc.c[s - 1]
                                       : Eigen::MatrixXd::Zero(H, B).eval();
          // Gate pre-activation gradients, in [i, f, g, o] row order.
          da.middleRows(0, H) =
              dcell.cwiseProduct(gg).cwiseProduct(gi).cwiseProduct(
                  (1.0 - gi.array()).matrix());
          da.middleRows(H, H) =
              dcell.cwiseProduct(c_prev).cwiseProduct(gf).cwiseProduct(
                  (1.0 - gf.array()).matrix());
          da.middleRows(2 * H, H) = dcell.cwiseProduct(gi).cwiseProduct(
              (1.0 - gg.array().square()).matrix());
          da.middleRows(3 * H, H) =
              dh.cwiseProduct(tc).cwiseProduct(go).cwiseProduct(
                  (1.0 - go.array()).matrix());
          dc_carry = dcell.cwiseProduct(gf);
        } else {
          da = dh.cwiseProduct((1.0 - dc.h[s].array().square()).matrix());
        }
        all_da.middleCols(t * B, B) = da;
        if (s > 0) {
          g_w_hh.noalias() += da * dc.h[s - 1].transpose();
        }
        g_b.col(0) += da.rowwise().sum();
        dh_carry.noalias() = w_hh.transpose() * da;
      }

      Eigen::MatrixXd all_x(in_dim, static_cast<int64_t>(T) * B);
      for (int t = 0; t < T; ++t) all_x.middleCols(t * B, B) = lc.input[t];
      g_w_ih.noalias() += all_da * all_x.transpose();
      if (l > 0) {
        Eigen::MatrixXd all_dx = w_ih.transpose() * all_da;
        for (int t = 0; t < T; ++t) {
          dinput[t] += all_dx.middleCols(t * B, B);
        }
      }
    }
    if (l > 0) dtop = std::move(dinput);
  }
  return nll;
}

double RunBatch(const ModelConfig& cfg, const ParameterSet& params,
                const LabeledBatch& batch, Gradients* grads,
                std::vector<Eigen::MatrixXd>* logprobs) {
  Require(!batch.features.empty(), "RecurrentClassifier: empty batch");
  Require(batch.features.size() == batch.labels.size(),
          "RecurrentClassifier: features/labels size mismatch");
  for (size_t i = 0; i < batch.features.size(); ++i) {
    Require(batch.features[i].cols() == cfg.input_dim,
            "RecurrentClassifier: feature dim does not match config");
    Require(batch.features[i].rows() >= 1,
            "RecurrentClassifier: empty utterance");
    Require(static_cast<size_t>(batch.features[i].rows()) ==
                batch.labels[i].size(),
            "RecurrentClassifier: label length must equal frame count");
  }

  // Group utterances by length so each group runs as one batched pass;
  // iteration order (ascending T, then batch order) is deterministic.
  std::map<int, std::vector<int>> groups;
  for (size_t i = 0; i < batch.features.size(); ++i) {
    groups[static_cast<int>(batch.features[i].rows())].push_back(
        static_cast<int>(i));
  }

  double inv_total = 1.0 / static_cast<double>(batch.TotalFrames());
  if (logprobs != nullptr) logprobs->resize(batch.features.size());

  double nll = 0.0;
  for (const auto& [t_len, utt_idx] : groups) {
    nll += RunGroup(cfg, params, batch, utt_idx, inv_total, grads, logprobs);
  }
  return nll * inv_total;
}

}  // namespace

std::vector<Eigen::MatrixXd> RecurrentClassifier::Forward(
    const ParameterSet& params, const LabeledBatch& batch) const {
  std::vector<Eigen::MatrixXd> logprobs;
  RunBatch(config_, params, batch, nullptr, &logprobs);
  return logprobs;
}

double RecurrentClassifier::Loss(const ParameterSet& params,
                                 const LabeledBatch& batch) const {
  return RunBatch(config_, params, batch, nullptr, nullptr);
}

std::pair<double, Gradients> RecurrentClassifier::LossAndGrad(
    const ParameterSet& params, const LabeledBatch& batch) const {
  Gradients grads = params.ZerosLike();
  double loss = RunBatch(config_, params, batch, &grads, nullptr);
  return {loss, std::move(grads)};
}

EvalMetrics ComputeMetrics(const RecurrentClassifier& model,
                           const ParameterSet& params,
                           const LabeledBatch& batch) {
  std::vector<Eigen::MatrixXd> logprobs = model.Forward(params, batch);
  EvalMetrics metrics;
  metrics.utterances = static_cast<int64_t>(batch.NumUtterances());
  double nll = 0.0;
  int64_t frame_errors = 0;
  int64_t utt_errors = 0;
  int n_classes = model.config().n_classes;
  for (size_t i = 0; i < batch.NumUtterances(); ++i) {
    const Eigen::MatrixXd& lp = logprobs[i];
    std::vector<int64_t> votes(n_classes, 0);
    for (int t = 0; t < lp.rows(); ++t) {
      Eigen::Index pred_idx = 0;
      lp.row(t).maxCoeff(&pred_idx);
      int pred = static_cast<int>(pred_idx);
      int label = batch.labels[i][t];
      Require(label >= 0 && label < n_classes,
              "ComputeMetrics: label out of range");
      if (pred != label) ++frame_errors;
      ++votes[pred];
      nll -= lp(t, label);
      ++metrics.frames;
    }
    int majority = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (votes[c] > votes[majority]) majority = c;
    }
    if (majority != batch.labels[i][0]) ++utt_errors;
  }
  metrics.frame_error =
      static_cast<double>(frame_errors) / static_cast<double>(metrics.frames);
  metrics.utterance_error = static_cast<double>(utt_errors) /
                            static_cast<double>(metrics.utterances);
  metrics.mean_cross_entropy = nll / static_cast<double>(metrics.frames);
  return metrics;
}

namespace {
constexpr uint32_t kCheckpointMagic = 0x4b43494d;  // "MICK" little-endian
constexpr uint32_t kCheckpointVersion = 1;
}  // namespace

void SaveCheckpoint(const std::string& path, const ModelConfig& config,
                    const ParameterSet& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("SaveCheckpoint: cannot open " + path);
  WriteU32(os, kCheckpointMagic);
  WriteU32(os, kCheckpointVersion);
  WriteU32(os, static_cast<uint32_t>(config.input_dim));
  WriteU32(os, static_cast<uint32_t>(config.layers));
  WriteU32(os, static_cast<uint32_t>(config.hidden));
  WriteU32(os, config.bidirectional ? 1 : 0);
  WriteU32(os, config.cell == CellType::kLstm ? 1 : 0);
  WriteU32(os, static_cast<uint32_t>(config.n_classes));
  WriteU32(os, static_cast<uint32_t>(params.Size()));
  for (const auto& [name, tensor] : params) {
    WriteU32(os, static_cast<uint32_t>(name.size()));
    WriteBytes(os, name.data(), name.size());
    WriteU32(os, static_cast<uint32_t>(tensor.rows()));
    WriteU32(os, static_cast<uint32_t>(tensor.cols()));
    for (int r = 0; r < tensor.rows(); ++r) {
      for (int c = 0; c < tensor.cols(); ++c) {
        WriteF64(os, tensor(r, c));
      }
    }
  }
  if (!os) throw std::runtime_error("SaveCheckpoint: write failed " + path);
}

std::pair<ModelConfig, ParameterSet> LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("LoadCheckpoint: cannot open " + path);
  if (ReadU32(is) != kCheckpointMagic)
    throw std::runtime_error("LoadCheckpoint: bad magic in " + path);
  if (ReadU32(is) != kCheckpointVersion)
    throw std::runtime_error("LoadCheckpoint: unsupported version");
  ModelConfig config;
  config.input_dim = static_cast<int>(ReadU32(is));
  config.layers = static_cast<int>(ReadU32(is));
  config.hidden = static_cast<int>(ReadU32(is));
  config.bidirectional = ReadU32(is) != 0;
  config.cell = ReadU32(is) != 0 ? CellType::kLstm : CellType::kSimpleRnn;
  config.n_classes = static_cast<int>(ReadU32(is));
  uint32_t count = ReadU32(is);
  ParameterSet params;
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t name_len = ReadU32(is);
    std::string name(name_len, '\0');
    ReadBytes(is, name.data(), name_len);
    uint32_t rows = ReadU32(is);
    uint32_t cols = ReadU32(is);
    Eigen::MatrixXd& tensor =
        params.Insert(name, static_cast<int>(rows), static_cast<int>(cols));
    for (uint32_t r = 0; r < rows; ++r) {
      for (uint32_t c = 0; c < cols; ++c) {
        tensor(r, c) = ReadF64(is);
      }
    }
  }
  return {config, std::move(params)};
}

}  // namespace mi
