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
#include <span>
#include <vector>

#include "qdn/tensor.hpp"

namespace qdn {

/// Cross-correlation of input [C_in, H, W] with filters [C_out, C_in, K, K]
/// plus biases [C_out], zero padding. Output [C_out, OH, OW] with
/// OH = (H + 2 pad - K) / stride + 1.
Tensor conv2d(const Tensor& input, const Tensor& filters, const Tensor& biases, std::size_t stride = 1,
              std::size_t pad = 1);

/// Gradients of conv2d. grad_filters and grad_biases are accumulated into;
/// grad_input (if non-null) is overwritten with the full transposed correlation.
void conv2d_backward(const Tensor& input, const Tensor& filters, const Tensor& grad_output, std::size_t stride,
                     std::size_t pad, Tensor* grad_input, std::span<double> grad_filters,
                     std::span<double> grad_biases);

struct PoolResult {
  Tensor output;
  /// Flat input index of the winner of each output cell.
  std::vector<std::size_t> argmax;
};

/// 2x2 max pooling, stride 2, on [C, H, W] with even H and W.
/// Ties go to the first maximum in row-major order within the block.
PoolResult maxpool2(const Tensor& input);

/// Routes each output gradient to its recorded argmax.
Tensor maxpool2_backward(const Tensor& grad_output, std::span<const std::size_t> argmax,
                         const std::vector<std::size_t>& input_shape);

Tensor relu(const Tensor& t);
/// grad *= (output > 0), in place.
void relu_backward(std::span<double> grad, std::span<const double> output);

/// y = W x + b with W [out, in].
void dense(std::span<const double> x, const Tensor& weights, const Tensor& biases, std::span<double> y);
/// Accumulates dW += gy x^T and db += gy; writes gx = W^T gy when gx is non-empty.
void dense_backward(std::span<const double> x, const Tensor& weights, std::span<const double> grad_y,
                    std::span<double> grad_weights, std::span<double> grad_biases, std::span<double> grad_x);

/// Max-subtracted softmax over two logits.
std::array<double, 2> softmax2(std::array<double, 2> logits);

/// -log(max(probs[label], 1e-12)).
double cross_entropy(std::array<double, 2> probs, int label);

}  // namespace qdn
