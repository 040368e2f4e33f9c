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

#include "leafcast/nn/optim.hpp"

#include <span>

#include "leafcast/error.hpp"
#include "leafcast/kernels.hpp"

namespace leafcast::nn {

OptimizerState OptimizerState::for_params(const Parameters& params) {
  OptimizerState s;
  s.m = Parameters::zeros_like(params);
  s.v = Parameters::zeros_like(params);
  return s;
}

void adam_step(Parameters& params, const Parameters& grads, OptimizerState& state,
               double learning_rate) {
  if (params.size() != state.m.size() || params.size() != grads.size()) {
    throw DataError("adam_step: optimizer state does not mirror parameters");
  }
  ++state.step;
  kernels::AdamArgs args{learning_rate, state.beta1, state.beta2, state.epsilon, state.step};

  std::vector<std::span<double>> p, m, v;
  std::vector<std::span<const double>> g;
  auto collect = [](auto& out) {
    return [&out](const std::string&, auto& t) { out.emplace_back(t.data(), static_cast<std::size_t>(t.size())); };
  };
  params.for_each_tensor(collect(p));
  state.m.for_each_tensor(collect(m));
  state.v.for_each_tensor(collect(v));
  grads.for_each_tensor(collect(g));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() != g[i].size()) throw DataError("adam_step: gradient shape mismatch");
    kernels::adam_update(p[i], g[i], m[i], v[i], args);
  }
}

}  // namespace leafcast::nn
