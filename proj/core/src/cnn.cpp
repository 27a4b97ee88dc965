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
#include <string>

#include "qdn/error.hpp"
#include "qdn/layers.hpp"
#include "qdn/random.hpp"

namespace qdn {

std::string_view param_name(Param p) {
  static constexpr std::array<std::string_view, kParamCount> names = {
      "conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias", "fc1.weight", "fc1.bias", "fc2.weight", "fc2.bias"};
  return names[static_cast<std::size_t>(p)];
}

CnnParams CnnParams::zeros(std::size_t n) {
  const std::size_t flat = kConv2Filters * n * n / 16;
  CnnParams p;
  p[Param::conv1_w] = Tensor({kConv1Filters, 1, 3, 3});
  p[Param::conv1_b] = Tensor({kConv1Filters});
  p[Param::conv2_w] = Tensor({kConv2Filters, kConv1Filters, 3, 3});
  p[Param::conv2_b] = Tensor({kConv2Filters});
  p[Param::fc1_w] = Tensor({kHidden, flat});
  p[Param::fc1_b] = Tensor({kHidden});
  p[Param::fc2_w] = Tensor({kClasses, kHidden});
  p[Param::fc2_b] = Tensor({kClasses});
  return p;
}

std::size_t CnnParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

void CnnParams::fill(double v) {
  for (auto& t : tensors)
    for (auto& x : t.data()) x = v;
}

void CnnParams::add(const CnnParams& other) {
  for (std::size_t i = 0; i < kParamCount; ++i) {
    auto dst = tensors[i].data();
    const auto src = other.tensors[i].data();
    if (dst.size() != src.size()) throw ShapeError("CnnParams::add: shape mismatch");
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

void CnnParams::scale(double s) {
  for (auto& t : tensors)
    for (auto& x : t.data()) x *= s;
}

CnnModel CnnModel::zeros(std::size_t n) {
  if (n == 0 || n % 4 != 0) throw ShapeError("cnn: input side " + std::to_string(n) + " must be a positive multiple of 4");
  return CnnModel{n, CnnParams::zeros(n)};
}

CnnModel CnnModel::initialized(std::size_t n, std::uint64_t seed) {
  CnnModel m = zeros(n);
  Rng rng(seed);
  const auto he = [&rng](Tensor& t, std::size_t fan_in) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : t.data()) v = (2.0 * rng.uniform() - 1.0) * limit;
  };
  he(m.params[Param::conv1_w], 1 * 9);
  he(m.params[Param::conv2_w], kConv1Filters * 9);
  he(m.params[Param::fc1_w], m.flat_size());
  he(m.params[Param::fc2_w], kHidden);
  return m;
}

Tensor image_to_input(const Image& image) {
  Tensor t({1, image.height, image.width});
  for (std::size_t i = 0; i < image.size(); ++i) t[i] = image.pixels[i] / 255.0;
  return t;
}

ForwardCache forward_cached(const CnnModel& model, const Tensor& input) {
  const std::size_t n = model.n;
  const bool square2 = input.rank() == 2 && input.extent(0) == n && input.extent(1) == n;
  const bool square3 = input.rank() == 3 && input.extent(0) == 1 && input.extent(1) == n && input.extent(2) == n;
  if (!square2 && !square3) {
    throw ShapeError("cnn forward: input does not match the model's " + std::to_string(n) + "x" + std::to_string(n) +
                     " input");
  }
  const auto& p = model.params;
  ForwardCache c;
  c.input = square3 ? input : input.reshaped({1, n, n});

  c.act1 = relu(conv2d(c.input, p[Param::conv1_w], p[Param::conv1_b]));
  auto pooled1 = maxpool2(c.act1);
  c.pool1 = std::move(pooled1.output);
  c.arg1 = std::move(pooled1.argmax);

  c.act2 = relu(conv2d(c.pool1, p[Param::conv2_w], p[Param::conv2_b]));
  auto pooled2 = maxpool2(c.act2);
  c.pool2 = std::move(pooled2.output);
  c.arg2 = std::move(pooled2.argmax);

  c.hidden.assign(kHidden, 0.0);
  dense(c.pool2.data(), p[Param::fc1_w], p[Param::fc1_b], c.hidden);
  for (auto& v : c.hidden) v = v > 0.0 ? v : 0.0;

  dense(c.hidden, p[Param::fc2_w], p[Param::fc2_b], c.logits);
  c.probs = softmax2(c.logits);
  return c;
}

Prediction forward(const CnnModel& model, const Tensor& input) {
  const auto c = forward_cached(model, input);
  return {c.probs[0], c.probs[1]};
}

Prediction forward(const CnnModel& model, const Image& image) { return forward(model, image_to_input(image)); }

double backward(const CnnModel& model, const ForwardCache& c, int label, CnnParams& g) {
  const double loss = cross_entropy(c.probs, label);
  const auto& p = model.params;

  // Softmax + cross-entropy: dL/dlogits = probs - onehot(label).
  std::array<double, 2> glogits = c.probs;
  glogits[static_cast<std::size_t>(label)] -= 1.0;

  std::vector<double> ghidden(kHidden);
  dense_backward(c.hidden, p[Param::fc2_w], glogits, g[Param::fc2_w].data(), g[Param::fc2_b].data(), ghidden);
  relu_backward(ghidden, c.hidden);

  Tensor gpool2(c.pool2.shape());
  dense_backward(c.pool2.data(), p[Param::fc1_w], ghidden, g[Param::fc1_w].data(), g[Param::fc1_b].data(),
                 gpool2.data());

  Tensor gact2 = maxpool2_backward(gpool2, c.arg2, c.act2.shape());
  relu_backward(gact2.data(), c.act2.data());

  Tensor gpool1;
  conv2d_backward(c.pool1, p[Param::conv2_w], gact2, 1, 1, &gpool1, g[Param::conv2_w].data(),
                  g[Param::conv2_b].data());

  Tensor gact1 = maxpool2_backward(gpool1, c.arg1, c.act1.shape());
  relu_backward(gact1.data(), c.act1.data());

  conv2d_backward(c.input, p[Param::conv1_w], gact1, 1, 1, nullptr, g[Param::conv1_w].data(),
                  g[Param::conv1_b].data());
  return loss;
}

CnnParams gradients(const CnnModel& model, const Tensor& input, int label, double* loss) {
  CnnParams g = CnnParams::zeros(model.n);
  const double l = backward(model, forward_cached(model, input), label, g);
  if (loss) *loss = l;
  return g;
}

}  // namespace qdn
