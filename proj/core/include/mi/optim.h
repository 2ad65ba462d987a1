// mi/optim.h  --  inner-loop SGD, outer-loop Adam, multi-step schedules
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

#ifndef MI_OPTIM_H_
#define MI_OPTIM_H_

#include <utility>
#include <vector>

#include "mi/model.h"

namespace mi {

struct SgdConfig {
  double lr = 2e-4;  // inner-loop alpha
};

// params - lr * grads, as a fresh set; the originals are preserved because
// every task adapts from the same meta parameters.
ParameterSet SgdStep(const ParameterSet& params, const Gradients& grads,
                     double lr);

// Standard bias-corrected Adam. State is immutable from the caller's view:
// AdamStep returns the advanced state rather than mutating in place, which
// makes state hand-off between threads safe.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t step_count = 0;
  ParameterSet m;  // first moments, parameter schema
  ParameterSet v;  // second moments, parameter schema

  static AdamState Init(const ParameterSet& params, double beta1 = 0.9,
                        double beta2 = 0.999, double eps = 1e-8);
};

std::pair<AdamState, ParameterSet> AdamStep(const AdamState& state,
                                            const ParameterSet& params,
                                            const Gradients& grads, double lr);

// lr_base * gamma^(number of milestones <= iteration): piecewise-constant,
// non-increasing. Milestones must be strictly increasing; 0 < gamma < 1.
struct MultiStepSchedule {
  double lr_base = 2e-4;
  std::vector<int64_t> milestones;
  double gamma = 0.15;

  void Validate() const;
};

double ScheduleLr(const MultiStepSchedule& schedule, int64_t iteration);

// The outer-loop schedule: 2e-4 held for the first 2,000 iterations, then one
// decay by 0.15 down to 3e-5 for the remainder.
MultiStepSchedule MetaOuterScheduleDefaults();

// The adaptation-stage schedule: 1e-5 for the first two epochs, then one
// decay by 0.1.
MultiStepSchedule AdaptScheduleDefaults();

}  // namespace mi

#endif  // MI_OPTIM_H_
