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

#include "leafcast/nn/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "leafcast/csv.hpp"
#include "leafcast/error.hpp"

namespace leafcast::nn {
namespace {

constexpr std::size_t kInferenceBatch = 256;

void check_compatible(const Model& model, const features::WindowedDataset& data) {
  if (static_cast<int>(data.feature_count()) != model.config.feature_count) {
    throw DataError("dataset has " + std::to_string(data.feature_count()) +
                    " features, model expects " + std::to_string(model.config.feature_count));
  }
  if (static_cast<int>(data.window()) != model.config.window_size) {
    throw DataError("dataset window " + std::to_string(data.window()) + " differs from model window " +
                    std::to_string(model.config.window_size));
  }
  if (!model.feature_names.empty() && model.feature_names != data.feature_names()) {
    throw DataError("dataset feature columns differ from the columns the model was trained on");
  }
}

std::vector<std::uint8_t> gather_labels(const features::WindowedDataset& data,
                                        std::span<const std::size_t> indices) {
  std::vector<std::uint8_t> y;
  y.reserve(indices.size());
  for (std::size_t i : indices) y.push_back(data.label(i) ? 1 : 0);
  return y;
}

// Calls f(indices) for consecutive chunks of at most `size` examples.
template <typename F>
void for_each_chunk(std::span<const std::size_t> order, std::size_t size, F&& f) {
  for (std::size_t start = 0; start < order.size(); start += size) {
    f(order.subspan(start, std::min(size, order.size() - start)));
  }
}

}  // namespace

Eigen::MatrixXd gather_batch(const features::WindowedDataset& data,
                             std::span<const std::size_t> indices) {
  const std::size_t w = data.window();
  const std::size_t f = data.feature_count();
  const std::size_t b = indices.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(w * b));
  for (std::size_t e = 0; e < b; ++e) {
    const auto win = data.window_values(indices[e]);
    for (std::size_t t = 0; t < w; ++t) {
      double* col = x.data() + (t * b + e) * f;
      std::copy_n(win.data() + t * f, f, col);
    }
  }
  return x;
}

TrainingSession start_session(const ModelConfig& config, std::vector<std::string> feature_names) {
  config.validate();
  TrainingSession s;
  s.model.config = config;
  s.model.params = init_params(config, config.seed);
  s.model.feature_names = std::move(feature_names);
  s.optimizer = OptimizerState::for_params(s.model.params);
  s.rng = Rng(Rng::derive(config.seed, 1));
  return s;
}

Evaluation evaluate(const Model& model, const features::WindowedDataset& data) {
  if (data.empty()) {
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  }
  check_compatible(model, data);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  double loss = 0.0;
  std::size_t correct = 0;
  for_each_chunk(order, kInferenceBatch, [&](std::span<const std::size_t> idx) {
    const auto cache = forward(model, gather_batch(data, idx), idx.size(), Mode::kInference);
    for (std::size_t e = 0; e < idx.size(); ++e) {
      const double p = cache.probabilities(static_cast<Eigen::Index>(e));
      const bool y = data.label(idx[e]);
      loss += bce_loss(p, y);
      correct += (p >= 0.5) == y;
    }
  });
  const double n = static_cast<double>(data.size());
  return {loss / n, static_cast<double>(correct) / n};
}

void train_epochs(TrainingSession& session, const features::WindowedDataset& train,
                  const features::WindowedDataset& val, int epochs) {
  if (epochs <= 0) return;
  if (train.empty()) throw DataError("training set is empty");
  Model& model = session.model;
  check_compatible(model, train);
  if (!val.empty()) check_compatible(model, val);

  const std::size_t batch = static_cast<std::size_t>(model.config.batch_size);
  std::vector<std::size_t> order(train.size());
  for (int e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), 0);
    session.rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for_each_chunk(order, batch, [&](std::span<const std::size_t> idx) {
      const auto y = gather_labels(train, idx);
      const auto cache = forward(model, gather_batch(train, idx), idx.size(), Mode::kTraining,
                                 &session.rng);
      const double loss = bce_loss(cache.probabilities, y);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite training loss at epoch " +
                           std::to_string(session.epochs_done + 1));
      }
      loss_sum += loss * static_cast<double>(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        correct += (cache.probabilities(static_cast<Eigen::Index>(i)) >= 0.5) == (y[i] != 0);
      }
      Parameters grads = backward(model, cache, bce_logit_gradient(cache.probabilities, y));
      clip_global_norm(grads, 1.0);
      adam_step(model.params, grads, session.optimizer, model.config.learning_rate);
    });
    if (!model.params.all_finite()) throw NumericError("parameters became non-finite");

    ++session.epochs_done;
    EpochMetrics m;
    m.epoch = session.epochs_done;
    m.train_loss = loss_sum / static_cast<double>(train.size());
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    const Evaluation v = evaluate(model, val);
    m.val_loss = v.loss;
    m.val_accuracy = v.accuracy;
    session.history.push_back(m);
  }
}

TrainResult train(const features::WindowedDataset& train_set, const features::WindowedDataset& val,
                  const ModelConfig& config) {
  TrainingSession session = start_session(config, train_set.feature_names());
  train_epochs(session, train_set, val, config.epochs);
  return {std::move(session.model), std::move(session.history)};
}

std::vector<Prediction> predict(const Model& model, const features::WindowedDataset& data,
                                double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("threshold must lie in (0, 1)");
  check_compatible(model, data);
  std::vector<Prediction> out(data.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for_each_chunk(order, kInferenceBatch, [&](std::span<const std::size_t> idx) {
    const auto cache = forward(model, gather_batch(data, idx), idx.size(), Mode::kInference);
    for (std::size_t e = 0; e < idx.size(); ++e) {
      const double p = cache.probabilities(static_cast<Eigen::Index>(e));
      out[idx[e]] = {p, p >= threshold};
    }
  });
  return out;
}

std::string write_metrics_csv(const std::vector<EpochMetrics>& metrics) {
  std::string out = "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& m : metrics) {
    out += csv::join({std::to_string(m.epoch), csv::format_double(m.train_loss),
                      csv::format_double(m.train_accuracy), csv::format_double(m.val_loss),
                      csv::format_double(m.val_accuracy)});
    out += '\n';
  }
  return out;
}

std::vector<EpochMetrics> parse_metrics_csv(std::string_view text) {
  const auto table = csv::Table::parse(text);
  table.expect_header({"epoch", "train_loss", "train_acc", "val_loss", "val_acc"});
  std::vector<EpochMetrics> out;
  for (const auto& r : table.rows()) {
    EpochMetrics m;
    m.epoch = static_cast<int>(csv::parse_int(r.fields[0], r.line, "epoch"));
    m.train_loss = csv::parse_double(r.fields[1], r.line, "train_loss");
    m.train_accuracy = csv::parse_double(r.fields[2], r.line, "train_acc");
    m.val_loss = csv::parse_double(r.fields[3], r.line, "val_loss");
    m.val_accuracy = csv::parse_double(r.fields[4], r.line, "val_acc");
    out.push_back(m);
  }
  return out;
}

}  // namespace leafcast::nn
