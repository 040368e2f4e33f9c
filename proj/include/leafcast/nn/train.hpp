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

#ifndef LEAFCAST_NN_TRAIN_HPP_
#define LEAFCAST_NN_TRAIN_HPP_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "leafcast/features.hpp"
#include "leafcast/nn/lstm.hpp"
#include "leafcast/nn/model.hpp"
#include "leafcast/nn/optim.hpp"
#include "leafcast/random.hpp"

namespace leafcast::nn {

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;  // NaN when there is no validation set
  double val_accuracy = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

// Everything needed to continue training later: parameters, optimizer moments,
// the shuffle / dropout stream and the metric history.
struct TrainingSession {
  Model model;
  OptimizerState optimizer;
  Rng rng;
  int epochs_done = 0;
  std::vector<EpochMetrics> history;
};

TrainingSession start_session(const ModelConfig& config, std::vector<std::string> feature_names = {});

// Runs `epochs` more epochs of shuffled mini-batch Adam with global-norm
// clipping at 1.0. Throws NumericError on a non-finite loss.
void train_epochs(TrainingSession& session, const features::WindowedDataset& train,
                  const features::WindowedDataset& val, int epochs);

struct TrainResult {
  Model model;
  std::vector<EpochMetrics> metrics;
};

TrainResult train(const features::WindowedDataset& train, const features::WindowedDataset& val,
                  const ModelConfig& config);

// Time-major (features x window*batch) input for the listed examples.
Eigen::MatrixXd gather_batch(const features::WindowedDataset& data,
                             std::span<const std::size_t> indices);

struct Prediction {
  double probability = 0.0;
  bool label = false;
};

// Inference mode; label = probability >= threshold, threshold in (0, 1).
std::vector<Prediction> predict(const Model& model, const features::WindowedDataset& data,
                                double threshold = 0.5);

// Mean loss and accuracy (threshold 0.5) in inference mode.
struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};
Evaluation evaluate(const Model& model, const features::WindowedDataset& data);

std::string write_metrics_csv(const std::vector<EpochMetrics>& metrics);
std::vector<EpochMetrics> parse_metrics_csv(std::string_view text);

}  // namespace leafcast::nn

#endif  // LEAFCAST_NN_TRAIN_HPP_
