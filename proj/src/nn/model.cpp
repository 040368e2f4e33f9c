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

#include "leafcast/nn/model.hpp"

#include <cmath>

#include "leafcast/error.hpp"

namespace leafcast::nn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw UsageError("unknown activation '" + std::string(name) + "'");
}

ModelConfig ModelConfig::leafcast_default(int feature_count) {
  ModelConfig c;
  c.layers = {{256, Activation::kTanh, 0.1}, {32, Activation::kRelu, 0.0}, {32, Activation::kRelu, 0.0}};
  c.learning_rate = 1e-3;
  c.feature_count = feature_count;
  return c;
}

void ModelConfig::validate() const {
  if (layers.empty()) throw UsageError("model needs at least one LSTM layer");
  for (const auto& l : layers) {
    if (l.units < 1) throw UsageError("layer units must be positive");
    if (!(l.dropout_rate >= 0.0 && l.dropout_rate <= 0.5)) {
      throw UsageError("dropout rate must lie in [0, 0.5]");
    }
  }
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (window_size < 1) throw UsageError("window size must be positive");
  if (feature_count < 1) throw UsageError("feature count must be positive");
  if (epochs < 0) throw UsageError("epochs must be non-negative");
  if (batch_size < 1) throw UsageError("batch size must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("threshold must lie in (0, 1)");
}

Parameters Parameters::zeros_like(const Parameters& other) {
  Parameters p = other;
  p.for_each_tensor([](const std::string&, auto& t) { t.setZero(); });
  return p;
}

std::size_t Parameters::size() const {
  std::size_t n = 0;
  for_each_tensor([&](const std::string&, const auto& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

double Parameters::squared_norm() const {
  double s = 0.0;
  for_each_tensor([&](const std::string&, const auto& t) { s += t.squaredNorm(); });
  return s;
}

bool Parameters::all_finite() const {
  bool ok = true;
  for_each_tensor([&](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

bool Parameters::operator==(const Parameters& other) const {
  if (layers.size() != other.layers.size()) return false;
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (!same(layers[k].W, other.layers[k].W) || !same(layers[k].U, other.layers[k].U) ||
        !same(layers[k].b, other.layers[k].b)) {
      return false;
    }
  }
  return same(head_w, other.head_w) && same(head_b, other.head_b);
}

double glorot_bound(int fan_in, int fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

namespace {

// Q from the QR decomposition of a Gaussian matrix, with column signs fixed
// by diag(R) so the draw is uniform over orthogonal matrices.
Eigen::MatrixXd orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

Parameters init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  Parameters p;
  int inputs = config.feature_count;
  for (const auto& spec : config.layers) {
    const int n = spec.units;
    LayerTensors layer;
    layer.W.resize(4 * n, inputs);
    const double bound = glorot_bound(inputs, n);
    for (int c = 0; c < inputs; ++c) {
      for (int r = 0; r < 4 * n; ++r) layer.W(r, c) = rng.uniform(-bound, bound);
    }
    layer.U.resize(4 * n, n);
    for (int g = 0; g < 4; ++g) layer.U.middleRows(g * n, n) = orthogonal(n, rng);
    layer.b = Eigen::VectorXd::Zero(4 * n);
    layer.b.segment(n, n).setOnes();
    p.layers.push_back(std::move(layer));
    inputs = n;
  }
  const double bound = glorot_bound(inputs, 1);
  p.head_w.resize(inputs);
  for (int i = 0; i < inputs; ++i) p.head_w(i) = rng.uniform(-bound, bound);
  p.head_b = Eigen::VectorXd::Zero(1);
  return p;
}

}  // namespace leafcast::nn
