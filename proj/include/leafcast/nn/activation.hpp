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

#ifndef LEAFCAST_NN_ACTIVATION_HPP_
#define LEAFCAST_NN_ACTIVATION_HPP_

#include <cmath>
#include <string>
#include <string_view>

namespace leafcast::nn {

enum class Activation { kTanh, kRelu, kSigmoid };

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::kTanh:
      return std::tanh(x);
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kSigmoid:
      return sigmoid(x);
  }
  return x;
}

// Derivative expressed through the activation's output y = activate(a, x).
inline double activate_grad_from_output(Activation a, double y) {
  switch (a) {
    case Activation::kTanh:
      return 1.0 - y * y;
    case Activation::kRelu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid:
      return y * (1.0 - y);
  }
  return 1.0;
}

std::string to_string(Activation a);
Activation parse_activation(std::string_view name);

}  // namespace leafcast::nn

#endif  // LEAFCAST_NN_ACTIVATION_HPP_
