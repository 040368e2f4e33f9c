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

#include "leafcast/kernels.hpp"
#include "leafcast/random.hpp"

namespace leafcast::kernels {
namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -2, double hi = 2) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

class KernelsAgree : public ::testing::TestWithParam<nn::Activation> {};

TEST_P(KernelsAgree, GatesForwardAndBackward) {
  Rng rng(1);
  const std::size_t units = 70, batch = 90, n = units * batch;
  const auto pre = random_vector(rng, 4 * n), c_prev = random_vector(rng, n);
  const auto dh = random_vector(rng, n), dc = random_vector(rng, n);
  std::vector<double> g1(4 * n), g2(4 * n), c1(n), c2(n), a1(n), a2(n), h1(n), h2(n);
  serial::lstm_gates_forward({units, batch, GetParam(), pre.data(), c_prev.data(), g1.data(), c1.data(), a1.data(), h1.data()});
  parallel::lstm_gates_forward({units, batch, GetParam(), pre.data(), c_prev.data(), g2.data(), c2.data(), a2.data(), h2.data()});
  EXPECT_EQ(g1, g2);
  EXPECT_EQ(c1, c2);
  EXPECT_EQ(h1, h2);

  std::vector<double> dp1(4 * n), dp2(4 * n), dcp1(n), dcp2(n);
  serial::lstm_gates_backward({units, batch, GetParam(), g1.data(), c_prev.data(), a1.data(), dh.data(), dc.data(), dp1.data(), dcp1.data()});
  parallel::lstm_gates_backward({units, batch, GetParam(), g1.data(), c_prev.data(), a1.data(), dh.data(), dc.data(), dp2.data(), dcp2.data()});
  EXPECT_EQ(dp1, dp2);
  EXPECT_EQ(dcp1, dcp2);
}

INSTANTIATE_TEST_SUITE_P(AllActivations, KernelsAgree,
                         ::testing::Values(nn::Activation::kTanh, nn::Activation::kRelu, nn::Activation::kSigmoid));

TEST(Kernels, AdamAgrees) {
  Rng rng(2);
  const std::size_t n = 20000;
  auto p1 = random_vector(rng, n), g = random_vector(rng, n), m1 = random_vector(rng, n), v1 = random_vector(rng, n, 0, 1);
  auto p2 = p1, m2 = m1, v2 = v1;
  const AdamArgs args{1e-3, 0.9, 0.999, 1e-8, 7};
  serial::adam_update(p1, g, m1, v1, args);
  parallel::adam_update(p2, g, m2, v2, args);
  EXPECT_EQ(p1, p2);
  EXPECT_EQ(m1, m2);
  EXPECT_EQ(v1, v2);
}

TEST(Kernels, MinMaxAgrees) {
  Rng rng(3);
  const std::size_t width = 5, rows = 3000;
  auto a = random_vector(rng, width * rows);
  auto b = a;
  const std::vector<double> mins{-1, -2, 0, 0, 3}, maxs{1, 2, 0, 1, 3};
  const std::vector<std::uint8_t> scaled{1, 1, 1, 0, 1};
  serial::minmax_apply(a, width, mins, maxs, scaled);
  parallel::minmax_apply(b, width, mins, maxs, scaled);
  EXPECT_EQ(a, b);
  for (std::size_t r = 0; r < rows; ++r) {
    EXPECT_EQ(a[r * width + 2], 0.0);
    EXPECT_EQ(a[r * width + 4], 0.0);
  }
}

TEST(Kernels, DispatchFollowsPolicy) {
  Rng rng(4);
  const auto x = random_vector(rng, 9000, 0, 1), y = random_vector(rng, 9000, 0, 1);
  std::vector<double> s(9000), p(9000);
  set_policy(Policy::kSerial);
  normalized_difference(x, y, s);
  set_policy(Policy::kParallel);
  normalized_difference(x, y, p);
  EXPECT_EQ(s, p);
  EXPECT_EQ(policy(), Policy::kParallel);
  EXPECT_GE(max_threads(), 1);
}

TEST(Kernels, GateForwardHandValues) {
  // One unit, one example: all pre-activations zero except forget = 1.
  const std::vector<double> pre{0, 1, 0, 0}, c_prev{2};
  std::vector<double> gates(4), c(1), c_act(1), h(1);
  serial::lstm_gates_forward({1, 1, nn::Activation::kTanh, pre.data(), c_prev.data(), gates.data(), c.data(), c_act.data(), h.data()});
  const double f = 1.0 / (1.0 + std::exp(-1.0));
  EXPECT_DOUBLE_EQ(c[0], 2.0 * f);
  EXPECT_DOUBLE_EQ(h[0], 0.5 * std::tanh(2.0 * f));
}

}  // namespace
}  // namespace leafcast::kernels
