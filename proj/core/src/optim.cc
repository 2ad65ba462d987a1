// core/src/optim.cc
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

#include "mi/optim.h"

#include <cmath>

#include "mi/common.h"

namespace mi {

ParameterSet SgdStep(const ParameterSet& params, const Gradients& grads,
                     double lr) {
  Require(lr > 0.0, "SgdStep: lr must be positive");
  return Axpy(params, grads, -lr);
}

AdamState AdamState::Init(const ParameterSet& params, double beta1,
                          double beta2, double eps) {
  Require(beta1 >= 0.0 && beta1 < 1.0, "AdamState: beta1 outside [0, 1)");
  Require(beta2 >= 0.0 && beta2 < 1.0, "AdamState: beta2 outside [0, 1)");
  Require(eps > 0.0, "AdamState: eps must be positive");
  AdamState state;
  state.beta1 = beta1;
  state.beta2 = beta2;
  state.eps = eps;
  state.step_count = 0;
  state.m = params.ZerosLike();
  state.v = params.ZerosLike();
  return state;
}

std::pair<AdamState, ParameterSet> AdamStep(const AdamState& state,
                                            const ParameterSet& params,
                                            const Gradients& grads,
                                            double lr) {
  params.CheckSameSchema(grads);
  params.CheckSameSchema(state.m);

  AdamState next = state;
  next.step_count = state.step_count + 1;
  double bias1 = 1.0 - std::pow(state.beta1, next.step_count);
  double bias2 = 1.0 - std::pow(state.beta2, next.step_count);

  ParameterSet updated = params;
  auto m_it = next.m.begin();
  auto v_it = next.v.begin();
  auto g_it = grads.begin();
  auto p_it = updated.begin();
  for (; m_it != next.m.end(); ++m_it, ++v_it, ++g_it, ++p_it) {
    Eigen::MatrixXd& m = m_it->second;
    Eigen::MatrixXd& v = v_it->second;
    const Eigen::MatrixXd& g = g_it->second;
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v.array().matrix() +
        (1.0 - state.beta2) * g.array().square().matrix();
    Eigen::ArrayXXd m_hat = m.array() / bias1;
    Eigen::ArrayXXd v_hat = v.array() / bias2;
    p_it->second.array() -= lr * m_hat / (v_hat.sqrt() + state.eps);
  }
  return {std::move(next), std::move(updated)};
}

void MultiStepSchedule::Validate() const {
  Require(lr_base > 0.0, "MultiStepSchedule: lr_base must be positive");
  Require(gamma > 0.0 && gamma < 1.0,
          "MultiStepSchedule: gamma must lie in (0, 1)");
  for (size_t i = 1; i < milestones.size(); ++i) {
    Require(milestones[i] > milestones[i - 1],
            "MultiStepSchedule: milestones must be strictly increasing");
  }
}

double ScheduleLr(const MultiStepSchedule& schedule, int64_t iteration) {
  Require(iteration >= 0, "ScheduleLr: iteration must be >= 0");
  int hits = 0;
  for (int64_t m : schedule.milestones) {
    if (m <= iteration) ++hits;
  }
  return schedule.lr_base * std::pow(schedule.gamma, hits);
}

MultiStepSchedule MetaOuterScheduleDefaults() {
  return MultiStepSchedule{2e-4, {2000}, 0.15};
}

MultiStepSchedule AdaptScheduleDefaults() {
  return MultiStepSchedule{1e-5, {2}, 0.1};
}

}  // namespace mi
