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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "leafcast/error.hpp"
#include "leafcast/nn/checkpoint.hpp"
#include "leafcast/nn/lstm.hpp"
#include "leafcast/nn/optim.hpp"
#include "leafcast/nn/train.hpp"
#include "oracles.hpp"

namespace leafcast::nn {
namespace {

ModelConfig small_config(int features, std::vector<LayerSpec> layers, int window = 3) {
  ModelConfig c;
  c.layers = std::move(layers);
  c.feature_count = features;
  c.window_size = window;
  return c;
}

Eigen::MatrixXd random_inputs(Rng& rng, int features, int window, int batch) {
  Eigen::MatrixXd x(features, window * batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
  return x;
}

TEST(Init, DeterministicAndStructured) {
  const auto cfg = small_config(8, {{32, Activation::kTanh, 0.0}, {16, Activation::kRelu, 0.0}});
  const auto a = init_params(cfg, 42), b = init_params(cfg, 42);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == init_params(cfg, 43));
  for (const auto& layer : a.layers) {
    const Eigen::Index n = layer.U.cols();
    for (Eigen::Index i = 0; i < 4 * n; ++i) EXPECT_EQ(layer.b[i], (i >= n && i < 2 * n) ? 1.0 : 0.0);
    for (int g = 0; g < 4; ++g) {
      const Eigen::MatrixXd block = layer.U.middleRows(g * n, n);
      EXPECT_TRUE((block.transpose() * block).isIdentity(1e-12));
    }
  }
  EXPECT_EQ(a.head_b[0], 0.0);
}

TEST(Init, GlorotBound) {
  EXPECT_NEAR(glorot_bound(8, 32), std::sqrt(6.0 / 40.0), 1e-15);
  EXPECT_NEAR(glorot_bound(8, 32), 0.3873, 1e-4);
  const auto p = init_params(small_config(8, {{32, Activation::kTanh, 0.0}}), 7);
  EXPECT_LE(p.layers[0].W.cwiseAbs().maxCoeff(), glorot_bound(8, 32));
  EXPECT_GT(p.layers[0].W.cwiseAbs().maxCoeff(), 0.9 * glorot_bound(8, 32));
}

LayerTensors zero_layer(int inputs, int units) {
  return {Eigen::MatrixXd::Zero(4 * units, inputs), Eigen::MatrixXd::Zero(4 * units, units),
          Eigen::VectorXd::Zero(4 * units)};
}

TEST(Cell, ZeroWeights) {
  for (auto act : {Activation::kTanh, Activation::kRelu}) {
    const auto s = lstm_cell_forward(zero_layer(2, 1), act, Eigen::MatrixXd::Ones(2, 1), Eigen::MatrixXd::Zero(1, 1),
                                     Eigen::MatrixXd::Zero(1, 1));
    EXPECT_EQ(s.gates(0, 0), 0.5);
    EXPECT_EQ(s.gates(1, 0), 0.5);
    EXPECT_EQ(s.gates(2, 0), 0.5);
    EXPECT_EQ(s.gates(3, 0), 0.0);
    EXPECT_EQ(s.c(0, 0), 0.0);
    EXPECT_EQ(s.h(0, 0), 0.0);
  }
}

TEST(Cell, ForgetBiasCarriesState) {
  auto layer = zero_layer(2, 1);
  layer.b[1] = 1.0;
  const auto s = lstm_cell_forward(layer, Activation::kTanh, Eigen::MatrixXd::Zero(2, 1), Eigen::MatrixXd::Zero(1, 1),
                                   Eigen::MatrixXd::Constant(1, 1, 2.0));
  EXPECT_NEAR(s.c(0, 0), 1.4621171572600098, 1e-15);
  EXPECT_NEAR(s.h(0, 0), 0.5 * std::tanh(1.4621171572600098), 1e-15);
  EXPECT_NEAR(s.h(0, 0), 0.44903150573044787, 1e-15);
}

TEST(Cell, ReluCandidateClipsToZero) {
  auto layer = zero_layer(1, 1);
  layer.W(3, 0) = 50.0;
  const auto s = lstm_cell_forward(layer, Activation::kRelu, Eigen::MatrixXd::Constant(1, 1, -3.0),
                                   Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1));
  EXPECT_EQ(s.gates(3, 0), 0.0);
}

TEST(Cell, StateStaysWithinConvexityBound) {
  Rng rng(12);
  const double B = 3.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto model = testing::random_model(rng, 1, 4, Activation::kTanh, 3, 1);
    Eigen::MatrixXd x(3, 5), h(4, 5), c(4, 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal(0, 5);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = rng.uniform(-1, 1), c.data()[i] = rng.uniform(-B, B);
    const auto s = lstm_cell_forward(model.params.layers[0], Activation::kTanh, x, h, c);
    ASSERT_LE(s.c.cwiseAbs().maxCoeff(), B + 1.0);
  }
}

TEST(Forward, ZeroHeadGivesHalf) {
  Rng rng(1);
  Model m{small_config(2, {{3, Activation::kTanh, 0.0}}), {}, {}};
  m.params = init_params(m.config, 5);
  m.params.head_w.setZero();
  const auto cache = forward(m, random_inputs(rng, 2, 3, 4), 4, Mode::kInference);
  for (Eigen::Index b = 0; b < 4; ++b) EXPECT_EQ(cache.probabilities[b], 0.5);
}

TEST(Forward, RangeDeterminismAndPermutation) {
  Rng rng(2);
  for (auto act : {Activation::kTanh, Activation::kRelu, Activation::kSigmoid}) {
    const auto m = testing::random_model(rng, 2, 4, act, 2, 3, 0.3);
    const int batch = 5;
    const auto x = random_inputs(rng, 2, 3, batch);
    const auto a = forward(m, x, batch, Mode::kInference);
    const auto b = forward(m, x, batch, Mode::kInference);
    EXPECT_EQ(a.probabilities, b.probabilities);
    for (Eigen::Index i = 0; i < batch; ++i) {
      EXPECT_GT(a.probabilities[i], 0.0);
      EXPECT_LT(a.probabilities[i], 1.0);
    }
    // Reverse the batch order inside every time step.
    Eigen::MatrixXd rev(x.rows(), x.cols());
    for (int t = 0; t < 3; ++t)
      for (int e = 0; e < batch; ++e) rev.col(t * batch + e) = x.col(t * batch + (batch - 1 - e));
    const auto r = forward(m, rev, batch, Mode::kInference);
    for (int e = 0; e < batch; ++e) EXPECT_EQ(r.probabilities[e], a.probabilities[batch - 1 - e]);
  }
}

TEST(Forward, DuplicatedBatchHasSingleExampleLoss) {
  Rng rng(3);
  const auto m = testing::random_model(rng, 2, 3, Activation::kTanh, 2, 3);
  const auto one = random_inputs(rng, 2, 3, 1);
  Eigen::MatrixXd four(2, 12);
  for (int t = 0; t < 3; ++t)
    for (int e = 0; e < 4; ++e) four.col(t * 4 + e) = one.col(t);
  const double l1 = bce_loss(forward(m, one, 1, Mode::kInference).probabilities, {1});
  const double l4 = bce_loss(forward(m, four, 4, Mode::kInference).probabilities, {1, 1, 1, 1});
  EXPECT_NEAR(l1, l4, 1e-15);
}

TEST(Forward, RejectsBadShapesAndNonFinite) {
  Rng rng(4);
  const auto m = testing::random_model(rng, 1, 2, Activation::kTanh, 2, 3);
  EXPECT_THROW(forward(m, Eigen::MatrixXd::Zero(3, 6), 2, Mode::kInference), Error);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 6);
  x(0, 0) = std::nan("");
  EXPECT_THROW(forward(m, x, 2, Mode::kInference), NumericError);
}

TEST(Bce, ClosedForms) {
  EXPECT_NEAR(bce_loss(0.5, true), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_loss(1e-9, true), -std::log(1e-7), 1e-12);
  EXPECT_LE(bce_loss(1.0, true), 1.1e-7);
  EXPECT_LE(bce_loss(0.0, false), 1.1e-7);
  EXPECT_TRUE(std::isfinite(bce_loss(0.0, true)));
}

TEST(Backward, MatchesFiniteDifferencesOnTwoUnitModel) {
  Rng rng(5);
  for (auto act : {Activation::kTanh, Activation::kRelu, Activation::kSigmoid}) {
    const auto m = testing::random_model(rng, 1, 2, act, 2, 3);
    const auto x = random_inputs(rng, 2, 3, 3);
    const auto r = testing::gradient_check(m, x, 3, {1, 0, 1}, 9);
    EXPECT_LT(r.max_relative_error, 1e-4) << to_string(act) << " worst " << r.worst_tensor;
  }
}

TEST(Backward, RandomisedSweep) {
  const auto r = testing::gradient_sweep(24, 77);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_tensor;
  EXPECT_GT(r.checked, 1000u);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  Rng rng(6);
  const auto m = testing::random_model(rng, 2, 3, Activation::kRelu, 2, 3);
  const auto cache = forward(m, random_inputs(rng, 2, 3, 2), 2, Mode::kInference);
  const auto g = backward(m, cache, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(g.squared_norm(), 0.0);
}

TEST(Backward, ClipGlobalNorm) {
  Rng rng(7);
  const auto m = testing::random_model(rng, 1, 2, Activation::kTanh, 2, 3);
  Parameters g = Parameters::zeros_like(m.params);
  g.for_each_tensor([&](const std::string&, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.normal();
  });
  const double scale = 5.0 / std::sqrt(g.squared_norm());
  g.for_each_tensor([&](const std::string&, auto& t) { t *= scale; });
  const Parameters before = g;
  EXPECT_NEAR(clip_global_norm(g, 1.0), 5.0, 1e-12);
  EXPECT_NEAR(std::sqrt(g.squared_norm()), 1.0, 1e-12);
  EXPECT_NEAR(g.head_w[0] * 5.0, before.head_w[0], 1e-12);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Parameters p;
  p.head_w = Eigen::VectorXd::Constant(2, 0.3);
  p.head_b = Eigen::VectorXd::Zero(1);
  Parameters g = Parameters::zeros_like(p);
  g.head_w.setConstant(1.0);
  auto state = OptimizerState::for_params(p);
  adam_step(p, g, state, 1e-3);
  EXPECT_NEAR(p.head_w[0] - 0.3, -1e-3, 1e-10);
  EXPECT_EQ(p.head_w[0], p.head_w[1]);
  EXPECT_EQ(p.head_b[0], 0.0);
  EXPECT_EQ(state.step, 1);
}

TEST(Dropout, Modes) {
  Rng rng(8);
  const int features = 6, batch = 40, steps = 3;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(features, steps * batch);
  Eigen::MatrixXd y = x;
  EXPECT_EQ(apply_dropout(y, batch, 0.0, rng, Mode::kTraining).size(), 0);
  EXPECT_EQ(y, x);
  apply_dropout(y, batch, 0.5, rng, Mode::kInference);
  EXPECT_EQ(y, x);
  const auto mask = apply_dropout(y, batch, 0.5, rng, Mode::kTraining);
  int dropped = 0;
  for (int f = 0; f < features; ++f) {
    for (int b = 0; b < batch; ++b) {
      const double m = mask(f, b);
      EXPECT_TRUE(m == 0.0 || m == 2.0);
      dropped += m == 0.0;
      for (int t = 0; t < steps; ++t) EXPECT_EQ(y(f, t * batch + b), m);
    }
  }
  EXPECT_GT(dropped, 60);
  EXPECT_LT(dropped, 180);
}

TEST(Train, OverfitsSeparableSet) {
  const auto data = testing::separable_set(20, 7, 3, 1);
  auto cfg = ModelConfig::leafcast_default(3);
  cfg.seed = 3;
  auto session = start_session(cfg, data.feature_names());
  double best = 0.0;
  for (int epoch = 0; epoch < 200 && best < 0.99; ++epoch) {
    train_epochs(session, data, {}, 1);
    best = std::max(best, evaluate(session.model, data).accuracy);
  }
  EXPECT_GE(best, 0.99);
}

TEST(Train, ZeroEpochsAndDeterminism) {
  const auto data = testing::separable_set(40, 4, 2, 2);
  auto cfg = small_config(2, {{8, Activation::kTanh, 0.1}, {4, Activation::kRelu, 0.0}}, 4);
  cfg.epochs = 0;
  cfg.seed = 11;
  const auto zero = train(data, data, cfg);
  EXPECT_TRUE(zero.metrics.empty());
  EXPECT_TRUE(zero.model.params == start_session(cfg).model.params);
  cfg.epochs = 4;
  const auto a = train(data, data, cfg), b = train(data, data, cfg);
  ASSERT_EQ(a.metrics.size(), 4u);
  for (std::size_t e = 0; e < 4; ++e) {
    EXPECT_EQ(a.metrics[e].train_loss, b.metrics[e].train_loss);
    EXPECT_EQ(a.metrics[e].val_loss, b.metrics[e].val_loss);
  }
  EXPECT_TRUE(a.model.params == b.model.params);
}

TEST(Train, OneStepLowersFirstBatchLoss) {
  const auto data = testing::separable_set(32, 5, 2, 4);
  auto cfg = small_config(2, {{16, Activation::kTanh, 0.0}}, 5);
  Model m{cfg, init_params(cfg, 1), {}};
  std::vector<std::size_t> idx(32);
  std::iota(idx.begin(), idx.end(), 0);
  const auto x = gather_batch(data, idx);
  const auto cache = forward(m, x, 32, Mode::kInference);
  const double before = bce_loss(cache.probabilities, data.labels());
  auto grads = backward(m, cache, bce_logit_gradient(cache.probabilities, data.labels()));
  clip_global_norm(grads);
  auto state = OptimizerState::for_params(m.params);
  adam_step(m.params, grads, state, 1e-3);
  EXPECT_LT(bce_loss(forward(m, x, 32, Mode::kInference).probabilities, data.labels()), before);
}

TEST(Predict, ThresholdRules) {
  const auto data = testing::separable_set(30, 3, 2, 5);
  Rng rng(9);
  auto m = testing::random_model(rng, 1, 3, Activation::kTanh, 2, 3);
  EXPECT_THROW(predict(m, data, 1.0), UsageError);
  EXPECT_THROW(predict(m, data, 0.0), UsageError);
  const auto lo = predict(m, data, 0.3), hi = predict(m, data, 0.7);
  for (std::size_t i = 0; i < lo.size(); ++i) EXPECT_TRUE(lo[i].label || !hi[i].label);
  m.params.head_w.setZero();
  m.params.head_b.setZero();
  for (const auto& p : predict(m, data, 0.5)) EXPECT_TRUE(p.label);
}

TEST(Checkpoint, RoundTripAndErrors) {
  Rng rng(10);
  auto m = testing::random_model(rng, 2, 3, Activation::kRelu, 2, 3, 0.2);
  m.feature_names = {"x0", "x1"};
  features::FeatureManifest manifest;
  manifest.feature_names = m.feature_names;
  manifest.column_kinds = {features::ColumnKind::kNumeric, features::ColumnKind::kNumeric};
  manifest.scaler = {{"x0", "x1"}, {0.1, -3.0}, {0.7, 1.0 / 3.0}};
  auto opt = OptimizerState::for_params(m.params);
  opt.step = 12;
  opt.m.head_w.setConstant(0.123456789);
  const std::string bytes = save_checkpoint({m, manifest, opt});
  const auto back = load_checkpoint(bytes);
  EXPECT_TRUE(back.model.params == m.params);
  EXPECT_EQ(back.model.config, m.config);
  EXPECT_EQ(back.manifest.scaler.maxs, manifest.scaler.maxs);
  ASSERT_TRUE(back.optimizer.has_value());
  EXPECT_TRUE(back.optimizer->m == opt.m);
  EXPECT_EQ(save_checkpoint(back), bytes);

  std::string corrupt = bytes;
  corrupt.replace(corrupt.find("LEAFCAST-CKPT-1"), 15, "LEAFCAST-CKPT-X");
  EXPECT_THROW(load_checkpoint(corrupt), DataError);
  EXPECT_THROW(load_checkpoint(bytes.substr(0, bytes.size() / 2)), DataError);

  features::WindowedDataset other(3, {"x0", "renamed"});
  other.push_back(std::vector<double>(6, 0.0), false, "T1", Date::from_ymd(2015, 1, 1));
  EXPECT_THROW(predict(back.model, other), DataError);
}

}  // namespace
}  // namespace leafcast::nn
