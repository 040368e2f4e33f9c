/* Copyright 2026 The Leafcast Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LEAFCAST_NN_OPTIM_HPP_
#define LEAFCAST_NN_OPTIM_HPP_

#include "leafcast/nn/model.hpp"

namespace leafcast::nn {

struct OptimizerState {
  Parameters m;
  Parameters v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static OptimizerState for_params(const Parameters& params);
};

// Adam with bias-corrected moments; increments state.step.
void adam_step(Parameters& params, const Parameters& grads, OptimizerState& state,
               double learning_rate);

}  // namespace leafcast::nn

#endif  // LEAFCAST_NN_OPTIM_HPP_
