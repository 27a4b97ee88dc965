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

#include "qdn/layers.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdn/error.hpp"

namespace qdn {
namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = 2.0 * rng.uniform() - 1.0;
  return t;
}

std::vector<double> as_vec(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

TEST(Conv2d, MatchesNaiveReferenceAcrossShapes) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t cin = 1 + rng.below(3), cout = 1 + rng.below(3), h = 3 + rng.below(8), w = 3 + rng.below(8);
    const std::size_t k = rng.below(2) ? 3 : 1, pad = rng.below(2);
    const Tensor in = random_tensor({cin, h, w}, rng);
    const Tensor f = random_tensor({cout, cin, k, k}, rng);
    const Tensor b = random_tensor({cout}, rng);
    const Tensor out = conv2d(in, f, b, 1, pad);
    const auto ref = testing::naive_conv(as_vec(in), cin, h, w, as_vec(f), as_vec(b), cout, k, pad);
    ASSERT_EQ(out.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(out[i], ref[i], 1e-12);
  }
}

TEST(Conv2d, StrideTwoSubsamplesStrideOne) {
  Rng rng(32);
  const Tensor in = random_tensor({2, 7, 7}, rng);
  const Tensor f = random_tensor({3, 2, 3, 3}, rng), b = random_tensor({3}, rng);
  const Tensor full = conv2d(in, f, b, 1, 1), half = conv2d(in, f, b, 2, 1);
  ASSERT_EQ(half.shape(), (std::vector<std::size_t>{3, 4, 4}));
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < 4; ++y)
      for (std::size_t x = 0; x < 4; ++x)
        EXPECT_DOUBLE_EQ(half[(c * 4 + y) * 4 + x], full[(c * 7 + 2 * y) * 7 + 2 * x]);
}

TEST(Conv2d, ShapeErrors) {
  const Tensor in({2, 4, 4});
  EXPECT_THROW(conv2d(in, Tensor({1, 3, 3, 3}), Tensor({1})), ShapeError);
  EXPECT_THROW(conv2d(in, Tensor({1, 2, 3, 3}), Tensor({2})), ShapeError);
  EXPECT_THROW(conv2d(Tensor({4, 4}), Tensor({1, 1, 3, 3}), Tensor({1})), ShapeError);
  EXPECT_THROW(conv2d(in, Tensor({1, 2, 7, 7}), Tensor({1}), 1, 1), ShapeError);
}

// Loss L = sum(out * G) makes grad_output = G; compare with central differences.
TEST(Conv2dBackward, MatchesFiniteDifferences) {
  Rng rng(33);
  for (const std::size_t stride : {1u, 2u}) {
    Tensor in = random_tensor({2, 5, 5}, rng);
    Tensor f = random_tensor({3, 2, 3, 3}, rng);
    const Tensor b = random_tensor({3}, rng);
    const Tensor g = random_tensor(conv2d(in, f, b, stride, 1).shape(), rng);
    const auto loss = [&] {
      const Tensor o = conv2d(in, f, b, stride, 1);
      double s = 0.0;
      for (std::size_t i = 0; i < o.size(); ++i) s += o[i] * g[i];
      return s;
    };
    Tensor gin;
    std::vector<double> gf(f.size(), 0.0), gb(3, 0.0);
    conv2d_backward(in, f, g, stride, 1, &gin, gf, gb);
    const double h = 1e-6;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double v = f[i];
      f[i] = v + h;
      const double up = loss();
      f[i] = v - h;
      const double down = loss();
      f[i] = v;
      EXPECT_NEAR(gf[i], (up - down) / (2 * h), 1e-7);
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
      const double v = in[i];
      in[i] = v + h;
      const double up = loss();
      in[i] = v - h;
      const double down = loss();
      in[i] = v;
      EXPECT_NEAR(gin[i], (up - down) / (2 * h), 1e-7);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size() / 3; ++i) s += g[c * (g.size() / 3) + i];
      EXPECT_NEAR(gb[c], s, 1e-12);
    }
  }
}

TEST(Conv2dBackward, AccumulatesIntoBuffers) {
  Rng rng(34);
  const Tensor in = random_tensor({1, 4, 4}, rng), f = random_tensor({1, 1, 3, 3}, rng);
  const Tensor g = random_tensor({1, 4, 4}, rng);
  std::vector<double> gf1(9, 0.0), gb1(1, 0.0), gf2(9, 0.0), gb2(1, 0.0);
  conv2d_backward(in, f, g, 1, 1, nullptr, gf1, gb1);
  conv2d_backward(in, f, g, 1, 1, nullptr, gf2, gb2);
  conv2d_backward(in, f, g, 1, 1, nullptr, gf2, gb2);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(gf2[i], 2 * gf1[i], 1e-12);
  EXPECT_NEAR(gb2[0], 2 * gb1[0], 1e-12);
}

TEST(MaxPool, PicksFirstMaximumOnTies) {
  const Tensor in({1, 2, 4}, {1, 5, 2, 2, 5, 3, 2, 2});
  const PoolResult r = maxpool2(in);
  EXPECT_EQ(r.output.shape(), (std::vector<std::size_t>{1, 1, 2}));
  EXPECT_EQ(r.output[0], 5);
  EXPECT_EQ(r.argmax[0], 1u);  // (0,1) precedes (1,0)
  EXPECT_EQ(r.output[1], 2);
  EXPECT_EQ(r.argmax[1], 2u);
  EXPECT_THROW(maxpool2(Tensor({1, 3, 4})), ShapeError);
}

TEST(MaxPool, BackwardRoutesToArgmax) {
  const Tensor in({1, 2, 2}, {0.1, 0.9, 0.3, 0.2});
  const PoolResult r = maxpool2(in);
  const Tensor g = maxpool2_backward(Tensor({1, 1, 1}, {2.5}), r.argmax, in.shape());
  EXPECT_EQ(as_vec(g), (std::vector<double>{0, 2.5, 0, 0}));
}

TEST(Relu, ForwardAndMask) {
  const Tensor t({4}, {-1.0, 0.0, 0.5, 2.0});
  const Tensor r = relu(t);
  EXPECT_EQ(as_vec(r), (std::vector<double>{0, 0, 0.5, 2}));
  std::vector<double> g = {1, 1, 1, 1};
  relu_backward(g, r.data());
  EXPECT_EQ(g, (std::vector<double>{0, 0, 1, 1}));
}

TEST(Dense, ForwardAndBackward) {
  const Tensor w({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b({2}, {0.5, -0.5});
  const std::vector<double> x = {1, 0, -1};
  std::vector<double> y(2);
  dense(x, w, b, y);
  EXPECT_EQ(y, (std::vector<double>{-1.5, -2.5}));

  const std::vector<double> gy = {1, 2};
  std::vector<double> gw(6, 0.0), gb(2, 0.0), gx(3, 0.0);
  dense_backward(x, w, gy, gw, gb, gx);
  EXPECT_EQ(gw, (std::vector<double>{1, 0, -1, 2, 0, -2}));
  EXPECT_EQ(gb, (std::vector<double>{1, 2}));
  EXPECT_EQ(gx, (std::vector<double>{9, 12, 15}));
}

TEST(Softmax, StableAndNormalized) {
  const auto p = softmax2({1000.0, 1000.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  const auto q = softmax2({0.0, std::log(3.0)});
  EXPECT_NEAR(q[1], 0.75, 1e-15);
  EXPECT_NEAR(q[0] + q[1], 1.0, 1e-15);
  const auto r = softmax2({-800.0, 800.0});
  EXPECT_EQ(r[1], 1.0);
}

TEST(CrossEntropy, FlooredLog) {
  EXPECT_NEAR(cross_entropy({0.25, 0.75}, 1), -std::log(0.75), 1e-15);
  EXPECT_NEAR(cross_entropy({1.0, 0.0}, 1), -std::log(1e-12), 1e-12);
  EXPECT_THROW(cross_entropy({0.5, 0.5}, 2), ShapeError);
}

}  // namespace
}  // namespace qdn
