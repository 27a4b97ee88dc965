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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "qdn/image.hpp"
#include "qdn/tensor.hpp"

namespace qdn {

/// Parameter slots of the classifier, in serialization order.
enum class Param : std::size_t { conv1_w, conv1_b, conv2_w, conv2_b, fc1_w, fc1_b, fc2_w, fc2_b };
inline constexpr std::size_t kParamCount = 8;
std::string_view param_name(Param p);

inline constexpr std::size_t kConv1Filters = 32;
inline constexpr std::size_t kConv2Filters = 64;
inline constexpr std::size_t kHidden = 256;
inline constexpr std::size_t kClasses = 2;

/// The eight parameter tensors. Also used as the gradient container.
struct CnnParams {
  std::array<Tensor, kParamCount> tensors;

  Tensor& operator[](Param p) { return tensors[static_cast<std::size_t>(p)]; }
  const Tensor& operator[](Param p) const { return tensors[static_cast<std::size_t>(p)]; }

  /// Zero tensors with the shapes of an n x n classifier.
  static CnnParams zeros(std::size_t n);
  std::size_t parameter_count() const;
  void fill(double v);
  /// this += other (same shapes).
  void add(const CnnParams& other);
  void scale(double s);

  bool operator==(const CnnParams&) const = default;
};

/// conv(1->32) relu pool conv(32->64) relu pool fc(64 n^2/16 -> 256) relu fc(256 -> 2) softmax.
struct CnnModel {
  std::size_t n = 0;
  CnnParams params;

  /// All-zero parameters. Throws ShapeError unless n > 0 and n % 4 == 0.
  static CnnModel zeros(std::size_t n);
  /// Seeded uniform He initialization U(-sqrt(6/fan_in), +sqrt(6/fan_in)); zero biases.
  static CnnModel initialized(std::size_t n, std::uint64_t seed);

  std::size_t flat_size() const { return kConv2Filters * n * n / 16; }

  bool operator==(const CnnModel&) const = default;
};

struct Prediction {
  double p_classical = 0.5;
  double p_quantum = 0.5;
  /// 1 iff p_quantum > p_classical; exact ties predict 0.
  int label() const { return p_quantum > p_classical ? 1 : 0; }
  /// P_q - P_c
  double confidence() const { return p_quantum - p_classical; }
};

/// Intermediate activations kept for the backward pass.
struct ForwardCache {
  Tensor input;   // [1, n, n]
  Tensor act1;    // relu(conv1) [32, n, n]
  Tensor pool1;   // [32, n/2, n/2]
  std::vector<std::size_t> arg1;
  Tensor act2;    // relu(conv2) [64, n/2, n/2]
  Tensor pool2;   // [64, n/4, n/4]
  std::vector<std::size_t> arg2;
  std::vector<double> hidden;  // relu(fc1), 256
  std::array<double, 2> logits{};
  std::array<double, 2> probs{};
};

/// Image intensities divided by 255 as a [1, n, n] tensor.
Tensor image_to_input(const Image& image);

/// Accepts [n, n] or [1, n, n]. Throws ShapeError when n differs from the model.
ForwardCache forward_cached(const CnnModel& model, const Tensor& input);
Prediction forward(const CnnModel& model, const Tensor& input);
Prediction forward(const CnnModel& model, const Image& image);

/// Gradients of cross_entropy(probs, label) w.r.t. every parameter, accumulated into `grads`.
/// Returns the loss.
double backward(const CnnModel& model, const ForwardCache& cache, int label, CnnParams& grads);
/// Convenience: forward + backward into a fresh gradient set.
CnnParams gradients(const CnnModel& model, const Tensor& input, int label, double* loss = nullptr);

}  // namespace qdn
