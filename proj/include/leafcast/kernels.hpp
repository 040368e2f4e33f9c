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

#ifndef LEAFCAST_KERNELS_HPP_
#define LEAFCAST_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include "leafcast/nn/activation.hpp"

// Data-parallel inner loops. Each kernel has a plain serial reference under
// `serial::` and an OpenMP version under `parallel::`; every kernel is
// elementwise, so both produce bitwise-identical results for any thread count.
// The unqualified entry points dispatch on the process-wide policy.
namespace leafcast::kernels {

enum class Policy { kSerial, kParallel };

void set_policy(Policy policy);
Policy policy();
// Caps OpenMP threads; values < 1 leave the runtime default. No-op without OpenMP.
void set_threads(int threads);
int max_threads();

// Column-major views over one LSTM time step of a mini-batch.
// `preact` and `gates` are (4*units) x batch with row blocks [i, f, o, candidate].
// `c_prev`, `c`, `c_act`, `h` are units x batch.
struct GateForwardArgs {
  std::size_t units = 0;
  std::size_t batch = 0;
  nn::Activation activation = nn::Activation::kTanh;
  const double* preact = nullptr;
  const double* c_prev = nullptr;
  double* gates = nullptr;
  double* c = nullptr;
  double* c_act = nullptr;
  double* h = nullptr;
};

// `dh` and `dc` are the incoming gradients w.r.t. h_t and c_t (dc already holds
// the contribution flowing back from t+1). Outputs the pre-activation gradient
// `dpreact` ((4*units) x batch) and `dc_prev` (units x batch).
struct GateBackwardArgs {
  std::size_t units = 0;
  std::size_t batch = 0;
  nn::Activation activation = nn::Activation::kTanh;
  const double* gates = nullptr;
  const double* c_prev = nullptr;
  const double* c_act = nullptr;
  const double* dh = nullptr;
  const double* dc = nullptr;
  double* dpreact = nullptr;
  double* dc_prev = nullptr;
};

struct AdamArgs {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 1;  // already incremented, >= 1
};

namespace serial {
void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out);
void lstm_gates_forward(const GateForwardArgs& args);
void lstm_gates_backward(const GateBackwardArgs& args);
void minmax_apply(std::span<double> rows, std::size_t width, std::span<const double> mins,
                  std::span<const double> maxs, std::span<const std::uint8_t> scaled);
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, const AdamArgs& args);
}  // namespace serial

namespace parallel {
void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out);
void lstm_gates_forward(const GateForwardArgs& args);
void lstm_gates_backward(const GateBackwardArgs& args);
void minmax_apply(std::span<double> rows, std::size_t width, std::span<const double> mins,
                  std::span<const double> maxs, std::span<const std::uint8_t> scaled);
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, const AdamArgs& args);
}  // namespace parallel

// (a - b) / (a + b); NaN where either input is NaN or a + b == 0.
void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out);
void lstm_gates_forward(const GateForwardArgs& args);
void lstm_gates_backward(const GateBackwardArgs& args);
// Row-major rows of `width` columns; columns with scaled[j] map to
// clamp((x - min) / (max - min), 0, 1), or 0 when max == min.
void minmax_apply(std::span<double> rows, std::size_t width, std::span<const double> mins,
                  std::span<const double> maxs, std::span<const std::uint8_t> scaled);
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, const AdamArgs& args);

}  // namespace leafcast::kernels

#endif  // LEAFCAST_KERNELS_HPP_
