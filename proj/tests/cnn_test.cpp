// Copyright 2026 The qdenoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdn/cnn.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdn/error.hpp"
#include "test_util.hpp"

namespace qdn {
namespace {

Tensor random_input(std::size_t n, Rng& rng) {
  Tensor t({1, n, n});
  for (auto& v : t.data()) v = rng.uniform();
  return t;
}

TEST(CnnModel, ShapesAndParameterCount) {
  const CnnModel m = CnnModel::zeros(28);
  EXPECT_EQ(m.params[Param::conv1_w].shape(), (std::vector<std::size_t>{32, 1, 3, 3}));
  EXPECT_EQ(m.params[Param::conv2_w].shape(), (std::vector<std::size_t>{64, 32, 3, 3}));
  EXPECT_EQ(m.params[Param::fc1_w].shape(), (std::vector<std::size_t>{256, 3136}));
  EXPECT_EQ(m.params[Param::fc2_w].shape(), (std::vector<std::size_t>{2, 256}));
  EXPECT_EQ(m.flat_size(), 3136u);
  // 320 + 18496 + 803072 + 514
  EXPECT_EQ(m.params.parameter_count(), 822402u);
  EXPECT_THROW(CnnModel::zeros(6), ShapeError);
  EXPECT_THROW(CnnModel::zeros(0), ShapeError);
  EXPECT_EQ(param_name(Param::fc1_b), "fc1.bias");
}

TEST(CnnModel, HeUniformInitIsSeededAndBounded) {
  const CnnModel a = CnnModel::initialized(12, 5);
  EXPECT_EQ(a, CnnModel::initialized(12, 5));
  EXPECT_NE(a, CnnModel::initialized(12, 6));
  const std::array<std::pair<Param, double>, 4> fan = {
      {{Param::conv1_w, 9.0}, {Param::conv2_w, 288.0}, {Param::fc1_w, 576.0}, {Param::fc2_w, 256.0}}};
  for (const auto& [slot, fan_in] : fan) {
    const double bound = std::sqrt(6.0 / fan_in);
    double max_abs = 0.0;
    for (const double v : a.params[slot].data()) {
      ASSERT_LE(std::abs(v), bound);
      max_abs = std::max(max_abs, std::abs(v));
    }
    EXPECT_GT(max_abs, 0.8 * bound);
  }
  for (const Param b : {Param::conv1_b, Param::conv2_b, Param::fc1_b, Param::fc2_b})
    for (const double v : a.params[b].data()) EXPECT_EQ(v, 0.0);
}

TEST(Forward, ProbabilitiesAndTies) {
  const Prediction z = forward(CnnModel::zeros(8), Image(8, 8, 100));
  EXPECT_EQ(z.p_classical, 0.5);
  EXPECT_EQ(z.p_quantum, 0.5);
  EXPECT_EQ(z.label(), 0);
  EXPECT_EQ(z.confidence(), 0.0);

  Rng rng(41);
  const CnnModel m = CnnModel::initialized(8, 1);
  const Prediction p = forward(m, testing::random_image(8, 8, rng));
  EXPECT_NEAR(p.p_classical + p.p_quantum, 1.0, 1e-15);
  EXPECT_THROW(forward(m, Image(12, 12)), ShapeError);
}

TEST(Forward, BiasSteersPrediction) {
  CnnModel m = CnnModel::zeros(4);
  m.params[Param::fc2_b][1] = std::log(3.0);
  const Prediction p = forward(m, Image(4, 4, 7));
  EXPECT_NEAR(p.p_quantum, 0.75, 1e-15);
  EXPECT_EQ(p.label(), 1);
  EXPECT_NEAR(p.confidence(), 0.5, 1e-15);
}

TEST(ImageToInput, ScalesByMaxIntensity) {
  const Tensor t = image_to_input(Image(2, 1, {0, 255}));
  EXPECT_EQ(t.shape(), (std::vector<std::size_t>{1, 1, 2}));
  EXPECT_EQ(t[0], 0.0);
  EXPECT_EQ(t[1], 1.0);
}

TEST(Forward, AcceptsRankTwoInput) {
  Rng rng(42);
  const CnnModel m = CnnModel::initialized(4, 2);
  const Tensor x = random_input(4, rng);
  const Prediction a = forward(m, x), b = forward(m, x.reshaped({4, 4}));
  EXPECT_EQ(a.p_quantum, b.p_quantum);
}

TEST(Backward, MatchesFiniteDifferencesSmallModel) {
  Rng rng(43);
  const CnnModel m = CnnModel::initialized(4, 3);
  for (int label = 0; label < 2; ++label) {
    const Tensor x = random_input(4, rng);
    double loss = 0.0;
    const CnnParams g = gradients(m, x, label, &loss);
    const std::vector<double> img(x.data().begin(), x.data().end());
    testing::ReferenceNet ref(m, img, label);
    EXPECT_NEAR(loss, ref.loss(), 1e-12);
    const auto r = testing::gradient_check(m, img, label, g);
    EXPECT_EQ(r.failures, 0u) << "worst relative error " << r.worst_relative;
    EXPECT_EQ(r.kink_mismatches, 0u);
    EXPECT_EQ(r.checked, m.params.parameter_count());
  }
}

TEST(Backward, AccumulatesAcrossCalls) {
  Rng rng(44);
  const CnnModel m = CnnModel::initialized(4, 4);
  const Tensor x = random_input(4, rng);
  const ForwardCache c = forward_cached(m, x);
  CnnParams once = CnnParams::zeros(4), twice = CnnParams::zeros(4);
  backward(m, c, 1, once);
  backward(m, c, 1, twice);
  backward(m, c, 1, twice);
  once.scale(2.0);
  for (std::size_t s = 0; s < kParamCount; ++s)
    for (std::size_t i = 0; i < once.tensors[s].size(); ++i)
      ASSERT_NEAR(once.tensors[s][i], twice.tensors[s][i], 1e-15);
}

TEST(CnnParams, FillAddScale) {
  CnnParams a = CnnParams::zeros(4), b = CnnParams::zeros(4);
  a.fill(1.0);
  b.fill(2.0);
  a.add(b);
  a.scale(0.5);
  for (const auto& t : a.tensors)
    for (const double v : t.data()) ASSERT_EQ(v, 1.5);
  EXPECT_THROW(a.add(CnnParams::zeros(8)), ShapeError);
}

}  // namespace
}  // namespace qdn
