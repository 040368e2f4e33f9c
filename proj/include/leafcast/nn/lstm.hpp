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

#ifndef LEAFCAST_NN_LSTM_HPP_
#define LEAFCAST_NN_LSTM_HPP_

#include <Eigen/Dense>
#include <vector>

#include "leafcast/nn/model.hpp"
#include "leafcast/random.hpp"

namespace leafcast::nn {

enum class Mode { kInference, kTraining };

// One time step over a batch (columns are examples).
struct CellStep {
  Eigen::MatrixXd gates;  // post-activation [i, f, o, candidate]
  Eigen::MatrixXd c;
  Eigen::MatrixXd c_act;  // act(c)
  Eigen::MatrixXd h;
};

// i, f, o = sigmoid(W x + U h + b); candidate = act(...);
// c = f * c_prev + i * candidate; h = o * act(c).
CellStep lstm_cell_forward(const LayerTensors& layer, Activation activation,
                           const Eigen::MatrixXd& x, const Eigen::MatrixXd& h_prev,
                           const Eigen::MatrixXd& c_prev);

// Activations for one layer over the whole window, stored time-major:
// column t * batch + b holds example b at step t.
struct LayerCache {
  Eigen::MatrixXd inputs;  // after dropout
  Eigen::MatrixXd mask;    // inputs x batch inverted-dropout mask, empty when unused
  Eigen::MatrixXd gates;
  Eigen::MatrixXd c;
  Eigen::MatrixXd c_act;
  Eigen::MatrixXd h;
};

struct ForwardCache {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::vector<LayerCache> layers;
  Eigen::VectorXd logits;
  Eigen::VectorXd probabilities;
};

// Inverted-dropout mask (rows x cols): each entry kept with probability
// 1 - rate and scaled by 1 / (1 - rate), or zero.
Eigen::MatrixXd sample_dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

// `sequence` is time-major (features x steps*batch). In training mode one mask
// per (feature, example) is drawn and shared by every step; inference is the
// identity. Returns the mask used (empty when none).
Eigen::MatrixXd apply_dropout(Eigen::MatrixXd& sequence, std::size_t batch, double rate, Rng& rng,
                              Mode mode);

// `inputs` is time-major (feature_count x window*batch). Dropout masks are drawn
// from `rng` in training mode; `rng` may be null in inference mode.
ForwardCache forward(const Model& model, const Eigen::MatrixXd& inputs, std::size_t batch,
                     Mode mode, Rng* rng = nullptr);

// Gradients of a loss w.r.t. every parameter given dLoss/dlogit per example.
Parameters backward(const Model& model, const ForwardCache& cache,
                    const Eigen::VectorXd& dlogits);

inline constexpr double kProbabilityClip = 1e-7;

// -[y ln p + (1 - y) ln(1 - p)] with p clipped to [1e-7, 1 - 1e-7].
double bce_loss(double p, bool y);
double bce_loss(const Eigen::VectorXd& p, const std::vector<std::uint8_t>& y);
// d(mean BCE)/d(logit): (p - y) / batch.
Eigen::VectorXd bce_logit_gradient(const Eigen::VectorXd& p, const std::vector<std::uint8_t>& y);

// Rescales so the global L2 norm is at most `max_norm`. Returns the norm
// before clipping.
double clip_global_norm(Parameters& grads, double max_norm = 1.0);

}  // namespace leafcast::nn

#endif  // LEAFCAST_NN_LSTM_HPP_
