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

#ifndef LEAFCAST_NN_MODEL_HPP_
#define LEAFCAST_NN_MODEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <string>
#include <vector>

#include "leafcast/nn/activation.hpp"
#include "leafcast/random.hpp"

namespace leafcast::nn {

struct LayerSpec {
  int units = 32;
  Activation activation = Activation::kTanh;
  double dropout_rate = 0.0;  // applied to this layer's input sequence

  bool operator==(const LayerSpec&) const = default;
};

struct ModelConfig {
  std::vector<LayerSpec> layers;
  double learning_rate = 1e-3;
  int window_size = 7;
  int feature_count = 1;
  int epochs = 10;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double threshold = 0.5;

  // 256 tanh (dropout 0.1) -> 32 relu -> 32 relu, lr 0.001.
  static ModelConfig leafcast_default(int feature_count);
  // Throws UsageError when a field is out of range.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

// Stacked gate blocks, rows ordered [input, forget, output, candidate]:
// W is (4*units x inputs), U is (4*units x units), b has 4*units entries.
struct LayerTensors {
  Eigen::MatrixXd W;
  Eigen::MatrixXd U;
  Eigen::VectorXd b;
};

struct Parameters {
  std::vector<LayerTensors> layers;
  Eigen::VectorXd head_w;  // units of the top layer
  Eigen::VectorXd head_b;  // one entry

  static Parameters zeros_like(const Parameters& other);

  // Visits every tensor as (name, matrix) in a fixed order.
  template <typename F>
  void for_each_tensor(F&& f) {
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const std::string p = "layer" + std::to_string(k) + ".";
      f(p + "W", layers[k].W);
      f(p + "U", layers[k].U);
      f(p + "b", layers[k].b);
    }
    f(std::string("head.w"), head_w);
    f(std::string("head.b"), head_b);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    const_cast<Parameters*>(this)->for_each_tensor(
        [&](const std::string& name, auto& t) { f(name, std::as_const(t)); });
  }

  std::size_t size() const;
  double squared_norm() const;
  bool all_finite() const;
  bool operator==(const Parameters& other) const;
};

struct Model {
  ModelConfig config;
  Parameters params;
  // Column order the model was trained on; checked by predict when non-empty.
  std::vector<std::string> feature_names;
};

// Glorot-uniform input weights (fan_in = inputs, fan_out = units per gate),
// orthogonal recurrent weights per gate, zero biases except forget = 1,
// Glorot-uniform dense head with zero bias.
Parameters init_params(const ModelConfig& config, std::uint64_t seed);
double glorot_bound(int fan_in, int fan_out);

}  // namespace leafcast::nn

#endif  // LEAFCAST_NN_MODEL_HPP_
