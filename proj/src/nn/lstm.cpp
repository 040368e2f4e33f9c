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

#include "leafcast/nn/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "leafcast/error.hpp"
#include "leafcast/kernels.hpp"

namespace leafcast::nn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

CellStep lstm_cell_forward(const LayerTensors& layer, Activation activation, const MatrixXd& x,
                           const MatrixXd& h_prev, const MatrixXd& c_prev) {
  const Index n = layer.U.cols();
  const Index batch = x.cols();
  if (x.rows() != layer.W.cols() || h_prev.rows() != n || c_prev.rows() != n ||
      h_prev.cols() != batch || c_prev.cols() != batch) {
    throw DataError("lstm_cell_forward: shape mismatch");
  }
  MatrixXd z = layer.W * x + layer.U * h_prev;
  z.colwise() += layer.b;
  CellStep step{MatrixXd(4 * n, batch), MatrixXd(n, batch), MatrixXd(n, batch), MatrixXd(n, batch)};
  kernels::GateForwardArgs args;
  args.units = static_cast<std::size_t>(n);
  args.batch = static_cast<std::size_t>(batch);
  args.activation = activation;
  args.preact = z.data();
  args.c_prev = c_prev.data();
  args.gates = step.gates.data();
  args.c = step.c.data();
  args.c_act = step.c_act.data();
  args.h = step.h.data();
  kernels::lstm_gates_forward(args);
  if (!step.h.allFinite() || !step.c.allFinite()) {
    throw NumericError("non-finite LSTM cell output");
  }
  return step;
}

MatrixXd sample_dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  MatrixXd mask(rows, cols);
  const double keep = 1.0 - rate;
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) mask(r, c) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
  }
  return mask;
}

MatrixXd apply_dropout(MatrixXd& sequence, std::size_t batch, double rate, Rng& rng, Mode mode) {
  if (mode == Mode::kInference || rate <= 0.0) return {};
  if (rate >= 1.0) throw UsageError("dropout rate must be below 1");
  const Index b = static_cast<Index>(batch);
  MatrixXd mask = sample_dropout_mask(sequence.rows(), b, rate, rng);
  const Index steps = sequence.cols() / b;
  for (Index t = 0; t < steps; ++t) sequence.middleCols(t * b, b).array() *= mask.array();
  return mask;
}

ForwardCache forward(const Model& model, const MatrixXd& inputs, std::size_t batch, Mode mode,
                     Rng* rng) {
  const auto& cfg = model.config;
  const Index b = static_cast<Index>(batch);
  if (batch == 0 || inputs.cols() % b != 0) throw DataError("forward: batch does not divide input");
  if (inputs.rows() != cfg.feature_count) {
    throw DataError("forward: expected " + std::to_string(cfg.feature_count) + " features, got " +
                    std::to_string(inputs.rows()));
  }
  const Index steps = inputs.cols() / b;
  if (steps != cfg.window_size) {
    throw DataError("forward: expected window " + std::to_string(cfg.window_size) + ", got " +
                    std::to_string(steps));
  }
  if (mode == Mode::kTraining && rng == nullptr) throw UsageError("training forward needs an rng");

  ForwardCache cache;
  cache.batch = batch;
  cache.steps = static_cast<std::size_t>(steps);
  cache.layers.resize(model.params.layers.size());

  const MatrixXd* below = &inputs;
  for (std::size_t k = 0; k < model.params.layers.size(); ++k) {
    const LayerTensors& layer = model.params.layers[k];
    const LayerSpec& spec = cfg.layers[k];
    LayerCache& lc = cache.layers[k];
    const Index n = layer.U.cols();

    lc.inputs = *below;
    if (mode == Mode::kTraining) lc.mask = apply_dropout(lc.inputs, batch, spec.dropout_rate, *rng, mode);

    // Input projection for every step at once; recurrent term added per step.
    MatrixXd z = layer.W * lc.inputs;
    z.colwise() += layer.b;
    lc.gates.resize(4 * n, steps * b);
    lc.c.resize(n, steps * b);
    lc.c_act.resize(n, steps * b);
    lc.h.resize(n, steps * b);
    const MatrixXd zeros = MatrixXd::Zero(n, b);

    for (Index t = 0; t < steps; ++t) {
      auto zt = z.middleCols(t * b, b);
      if (t > 0) zt.noalias() += layer.U * lc.h.middleCols((t - 1) * b, b);
      kernels::GateForwardArgs args;
      args.units = static_cast<std::size_t>(n);
      args.batch = batch;
      args.activation = spec.activation;
      args.preact = zt.data();
      args.c_prev = t > 0 ? lc.c.data() + (t - 1) * b * n : zeros.data();
      args.gates = lc.gates.data() + t * b * 4 * n;
      args.c = lc.c.data() + t * b * n;
      args.c_act = lc.c_act.data() + t * b * n;
      args.h = lc.h.data() + t * b * n;
      kernels::lstm_gates_forward(args);
    }
    if (!lc.h.allFinite() || !lc.c.allFinite()) {
      throw NumericError("non-finite activations in LSTM layer " + std::to_string(k));
    }
    below = &lc.h;
  }

  const auto& top = cache.layers.back().h;
  const auto last = top.middleCols((steps - 1) * b, b);
  cache.logits = last.transpose() * model.params.head_w;
  cache.logits.array() += model.params.head_b(0);
  cache.probabilities = cache.logits.unaryExpr([](double z) { return sigmoid(z); });
  if (!cache.logits.allFinite()) throw NumericError("non-finite output logits");
  return cache;
}

Parameters backward(const Model& model, const ForwardCache& cache, const VectorXd& dlogits) {
  if (cache.layers.size() != model.params.layers.size() || cache.batch == 0) {
    throw DataError("backward: forward cache missing or from a different model");
  }
  const Index b = static_cast<Index>(cache.batch);
  const Index steps = static_cast<Index>(cache.steps);
  if (dlogits.size() != b) throw DataError("backward: gradient size does not match batch");

  Parameters grads;
  grads.layers.resize(model.params.layers.size());

  const auto& top = cache.layers.back().h;
  const Index top_units = top.rows();
  grads.head_w = top.middleCols((steps - 1) * b, b) * dlogits;
  grads.head_b = VectorXd::Constant(1, dlogits.sum());

  // Gradient w.r.t. the current layer's h sequence, time-major.
  MatrixXd dh_seq = MatrixXd::Zero(top_units, steps * b);
  dh_seq.middleCols((steps - 1) * b, b) = model.params.head_w * dlogits.transpose();

  for (std::size_t kk = model.params.layers.size(); kk-- > 0;) {
    const LayerTensors& layer = model.params.layers[kk];
    const LayerCache& lc = cache.layers[kk];
    const Activation act = model.config.layers[kk].activation;
    const Index n = layer.U.cols();

    MatrixXd dz(4 * n, steps * b);
    MatrixXd dh = MatrixXd::Zero(n, b);
    MatrixXd dc = MatrixXd::Zero(n, b);
    MatrixXd dc_prev(n, b);
    MatrixXd dh_total(n, b);
    const MatrixXd zeros = MatrixXd::Zero(n, b);

    for (Index t = steps; t-- > 0;) {
      dh_total = dh_seq.middleCols(t * b, b) + dh;
      kernels::GateBackwardArgs args;
      args.units = static_cast<std::size_t>(n);
      args.batch = cache.batch;
      args.activation = act;
      args.gates = lc.gates.data() + t * b * 4 * n;
      args.c_prev = t > 0 ? lc.c.data() + (t - 1) * b * n : zeros.data();
      args.c_act = lc.c_act.data() + t * b * n;
      args.dh = dh_total.data();
      args.dc = dc.data();
      args.dpreact = dz.data() + t * b * 4 * n;
      args.dc_prev = dc_prev.data();
      kernels::lstm_gates_backward(args);
      dh.noalias() = layer.U.transpose() * dz.middleCols(t * b, b);
      dc.swap(dc_prev);
    }

    LayerTensors& g = grads.layers[kk];
    g.W.noalias() = dz * lc.inputs.transpose();
    g.U = MatrixXd::Zero(4 * n, n);
    if (steps > 1) {
      g.U.noalias() = dz.rightCols((steps - 1) * b) * lc.h.leftCols((steps - 1) * b).transpose();
    }
    g.b = dz.rowwise().sum();

    if (kk > 0) {
      dh_seq.noalias() = layer.W.transpose() * dz;
      if (lc.mask.size() > 0) {
        for (Index t = 0; t < steps; ++t) dh_seq.middleCols(t * b, b).array() *= lc.mask.array();
      }
    }
  }
  return grads;
}

double bce_loss(double p, bool y) {
  const double q = std::clamp(p, kProbabilityClip, 1.0 - kProbabilityClip);
  return y ? -std::log(q) : -std::log(1.0 - q);
}

double bce_loss(const VectorXd& p, const std::vector<std::uint8_t>& y) {
  double sum = 0.0;
  for (Index i = 0; i < p.size(); ++i) sum += bce_loss(p(i), y[static_cast<std::size_t>(i)] != 0);
  return p.size() ? sum / static_cast<double>(p.size()) : 0.0;
}

VectorXd bce_logit_gradient(const VectorXd& p, const std::vector<std::uint8_t>& y) {
  VectorXd g(p.size());
  const double inv = 1.0 / static_cast<double>(p.size());
  for (Index i = 0; i < p.size(); ++i) g(i) = (p(i) - (y[static_cast<std::size_t>(i)] ? 1.0 : 0.0)) * inv;
  return g;
}

double clip_global_norm(Parameters& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    grads.for_each_tensor([&](const std::string&, auto& t) { t *= scale; });
  }
  return norm;
}

}  // namespace leafcast::nn
