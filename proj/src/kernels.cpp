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

#include "leafcast/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#ifdef LEAFCAST_WITH_OPENMP
#include <omp.h>
#endif

namespace leafcast::kernels {
namespace {

#ifdef LEAFCAST_WITH_OPENMP
std::atomic<Policy> g_policy{Policy::kParallel};
#else
std::atomic<Policy> g_policy{Policy::kSerial};
#endif

// Below this many elements the fork/join overhead dominates.
constexpr long kParallelThreshold = 4096;

inline double nd_cell(double a, double b) {
  const double sum = a + b;
  if (std::isnan(a) || std::isnan(b) || sum == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return (a - b) / sum;
}

// One column (example) of the gate forward pass.
inline void gate_forward_column(const GateForwardArgs& a, std::size_t col) {
  const std::size_t n = a.units;
  const double* z = a.preact + col * 4 * n;
  double* g = a.gates + col * 4 * n;
  const double* cp = a.c_prev + col * n;
  double* c = a.c + col * n;
  double* ca = a.c_act + col * n;
  double* h = a.h + col * n;
  for (std::size_t k = 0; k < n; ++k) {
    const double ig = nn::sigmoid(z[k]);
    const double fg = nn::sigmoid(z[n + k]);
    const double og = nn::sigmoid(z[2 * n + k]);
    const double cand = nn::activate(a.activation, z[3 * n + k]);
    g[k] = ig;
    g[n + k] = fg;
    g[2 * n + k] = og;
    g[3 * n + k] = cand;
    c[k] = fg * cp[k] + ig * cand;
    ca[k] = nn::activate(a.activation, c[k]);
    h[k] = og * ca[k];
  }
}

inline void gate_backward_column(const GateBackwardArgs& a, std::size_t col) {
  const std::size_t n = a.units;
  const double* g = a.gates + col * 4 * n;
  const double* cp = a.c_prev + col * n;
  const double* ca = a.c_act + col * n;
  const double* dh = a.dh + col * n;
  const double* dcin = a.dc + col * n;
  double* dz = a.dpreact + col * 4 * n;
  double* dcp = a.dc_prev + col * n;
  for (std::size_t k = 0; k < n; ++k) {
    const double ig = g[k], fg = g[n + k], og = g[2 * n + k], cand = g[3 * n + k];
    const double dc = dcin[k] + dh[k] * og * nn::activate_grad_from_output(a.activation, ca[k]);
    dz[k] = dc * cand * ig * (1.0 - ig);
    dz[n + k] = dc * cp[k] * fg * (1.0 - fg);
    dz[2 * n + k] = dh[k] * ca[k] * og * (1.0 - og);
    dz[3 * n + k] = dc * ig * nn::activate_grad_from_output(a.activation, cand);
    dcp[k] = dc * fg;
  }
}

inline double minmax_cell(double x, double lo, double hi) {
  if (hi == lo) return 0.0;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

struct AdamCoefficients {
  double correction1, correction2;
};

inline AdamCoefficients adam_coefficients(const AdamArgs& args) {
  return {1.0 - std::pow(args.beta1, static_cast<double>(args.step)),
          1.0 - std::pow(args.beta2, static_cast<double>(args.step))};
}

inline void adam_cell(double& p, double g, double& m, double& v, const AdamArgs& args,
                      const AdamCoefficients& k) {
  m = args.beta1 * m + (1.0 - args.beta1) * g;
  v = args.beta2 * v + (1.0 - args.beta2) * g * g;
  const double m_hat = m / k.correction1;
  const double v_hat = v / k.correction2;
  p -= args.learning_rate * m_hat / (std::sqrt(v_hat) + args.epsilon);
}

}  // namespace

void set_policy(Policy p) { g_policy.store(p); }
Policy policy() { return g_policy.load(); }

void set_threads(int threads) {
#ifdef LEAFCAST_WITH_OPENMP
  if (threads >= 1) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int max_threads() {
#ifdef LEAFCAST_WITH_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = nd_cell(a[i], b[i]);
}

void lstm_gates_forward(const GateForwardArgs& args) {
  for (std::size_t col = 0; col < args.batch; ++col) gate_forward_column(args, col);
}

void lstm_gates_backward(const GateBackwardArgs& args) {
  for (std::size_t col = 0; col < args.batch; ++col) gate_backward_column(args, col);
}

void minmax_apply(std::span<double> rows, std::size_t width, std::span<const double> mins,
                  std::span<const double> maxs, std::span<const std::uint8_t> scaled) {
  const std::size_t n = width == 0 ? 0 : rows.size() / width;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < width; ++j) {
      if (scaled[j]) rows[r * width + j] = minmax_cell(rows[r * width + j], mins[j], maxs[j]);
    }
  }
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, const AdamArgs& args) {
  const auto k = adam_coefficients(args);
  for (std::size_t i = 0; i < params.size(); ++i) adam_cell(params[i], grads[i], m[i], v[i], args, k);
}

}  // namespace serial

namespace parallel {

void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out) {
  const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (long i = 0; i < n; ++i) out[i] = nd_cell(a[i], b[i]);
}

void lstm_gates_forward(const GateForwardArgs& args) {
  const long cols = static_cast<long>(args.batch);
  const long work = cols * static_cast<long>(args.units);
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (long col = 0; col < cols; ++col) gate_forward_column(args, static_cast<std::size_t>(col));
}

void lstm_gates_backward(const GateBackwardArgs& args) {
  const long cols = static_cast<long>(args.batch);
  const long work = cols * static_cast<long>(args.units);
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (long col = 0; col < cols; ++col) gate_backward_column(args, static_cast<std::size_t>(col));
}

void minmax_apply(std::span<double> rows, std::size_t width, std::span<const double> mins,
                  std::span<const double> maxs, std::span<const std::uint8_t> scaled) {
  const long n = width == 0 ? 0 : static_cast<long>(rows.size() / width);
#pragma omp parallel for schedule(static) if (static_cast<long>(rows.size()) > kParallelThreshold)
  for (long r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < width; ++j) {
      if (scaled[j]) rows[r * width + j] = minmax_cell(rows[r * width + j], mins[j], maxs[j]);
    }
  }
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, const AdamArgs& args) {
  const auto k = adam_coefficients(args);
  const long n = static_cast<long>(params.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (long i = 0; i < n; ++i) adam_cell(params[i], grads[i], m[i], v[i], args, k);
}

}  // namespace parallel

void normalized_difference(std::span<const double> a, std::span<const double> b,
                           std::span<double> out) {
  policy() == Policy::kParallel ? parallel::normalized_difference(a, b, out)
                                : serial::normalized_difference(a, b, out);
}

void lstm_gates_forward(const GateForwardArgs& args) {
  policy() == Policy::kParallel ? parallel::lstm_gates_forward(args)
                                : serial::lstm_gates_forward(args);
}

void lstm_gates_backward(const GateBackwardArgs& args) {
  policy() == Policy::kParallel ? parallel::lstm_gates_backward(args)
                                : serial::lstm_gates_backward(args);
}

void minmax_apply(std::span<double> rows, std::size_t width, std::span<const double> mins,
                  std::span<const double> maxs, std::span<const std::uint8_t> scaled) {
  policy() == Policy::kParallel ? parallel::minmax_apply(rows, width, mins, maxs, scaled)
                                : serial::minmax_apply(rows, width, mins, maxs, scaled);
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, const AdamArgs& args) {
  policy() == Policy::kParallel ? parallel::adam_update(params, grads, m, v, args)
                                : serial::adam_update(params, grads, m, v, args);
}

}  // namespace leafcast::kernels
