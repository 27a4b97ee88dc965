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

#include <algorithm>
#include <cmath>
#include <string>

#include "qdn/error.hpp"

namespace qdn {
namespace {

struct ConvGeometry {
  std::size_t c_in, h, w, c_out, k, oh, ow;
};

ConvGeometry conv_geometry(const Tensor& input, const Tensor& filters, std::size_t stride, std::size_t pad) {
  if (input.rank() != 3) throw ShapeError("conv2d: input must be [C, H, W]");
  if (filters.rank() != 4) throw ShapeError("conv2d: filters must be [C_out, C_in, K, K]");
  if (stride == 0) throw ShapeError("conv2d: stride must be positive");
  ConvGeometry g{};
  g.c_in = input.extent(0);
  g.h = input.extent(1);
  g.w = input.extent(2);
  g.c_out = filters.extent(0);
  g.k = filters.extent(2);
  if (filters.extent(1) != g.c_in || filters.extent(3) != g.k) {
    throw ShapeError("conv2d: filter shape does not match " + std::to_string(g.c_in) + " input channels");
  }
  if (g.h + 2 * pad < g.k || g.w + 2 * pad < g.k) throw ShapeError("conv2d: kernel larger than padded input");
  g.oh = (g.h + 2 * pad - g.k) / stride + 1;
  g.ow = (g.w + 2 * pad - g.k) / stride + 1;
  return g;
}

// Output index range [lo, hi) for which in = out * stride + tap - pad lies in [0, n).
struct Range {
  std::size_t lo, hi;
};

Range valid_range(std::size_t n, std::size_t out_n, std::size_t tap, std::size_t stride, std::size_t pad) {
  const long offset = static_cast<long>(tap) - static_cast<long>(pad);
  const long s = static_cast<long>(stride);
  long lo = 0;
  if (offset < 0) lo = (-offset + s - 1) / s;
  long hi = (static_cast<long>(n) - 1 - offset);
  hi = hi < 0 ? 0 : hi / s + 1;
  hi = std::min(hi, static_cast<long>(out_n));
  if (lo > hi) lo = hi;
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& filters, const Tensor& biases, std::size_t stride, std::size_t pad) {
  const ConvGeometry g = conv_geometry(input, filters, stride, pad);
  if (biases.size() != g.c_out) throw ShapeError("conv2d: bias count does not match output channels");

  Tensor out({g.c_out, g.oh, g.ow});
  const double* in = input.data().data();
  const double* wts = filters.data().data();
  double* o = out.data().data();

  for (std::size_t co = 0; co < g.c_out; ++co) {
    double* oplane = o + co * g.oh * g.ow;
    std::fill(oplane, oplane + g.oh * g.ow, biases[co]);
    for (std::size_t ci = 0; ci < g.c_in; ++ci) {
      const double* iplane = in + ci * g.h * g.w;
      const double* kern = wts + (co * g.c_in + ci) * g.k * g.k;
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        const Range ry = valid_range(g.h, g.oh, ky, stride, pad);
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          const Range rx = valid_range(g.w, g.ow, kx, stride, pad);
          const double wv = kern[ky * g.k + kx];
          for (std::size_t oy = ry.lo; oy < ry.hi; ++oy) {
            const double* irow = iplane + (oy * stride + ky - pad) * g.w;
            double* orow = oplane + oy * g.ow;
            if (stride == 1) {
              const double* src = irow + kx - pad;
              for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) orow[ox] += wv * src[ox];
            } else {
              for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) orow[ox] += wv * irow[ox * stride + kx - pad];
            }
          }
        }
      }
    }
  }
  return out;
}

void conv2d_backward(const Tensor& input, const Tensor& filters, const Tensor& grad_output, std::size_t stride,
                     std::size_t pad, Tensor* grad_input, std::span<double> grad_filters,
                     std::span<double> grad_biases) {
  const ConvGeometry g = conv_geometry(input, filters, stride, pad);
  if (grad_output.size() != g.c_out * g.oh * g.ow) throw ShapeError("conv2d_backward: grad_output shape mismatch");
  if (grad_filters.size() != filters.size() || grad_biases.size() != g.c_out) {
    throw ShapeError("conv2d_backward: gradient buffer shape mismatch");
  }
  if (grad_input) *grad_input = Tensor(input.shape());

  const double* in = input.data().data();
  const double* wts = filters.data().data();
  const double* go = grad_output.data().data();
  double* gi = grad_input ? grad_input->data().data() : nullptr;

  for (std::size_t co = 0; co < g.c_out; ++co) {
    const double* gplane = go + co * g.oh * g.ow;
    double bsum = 0.0;
    for (std::size_t i = 0; i < g.oh * g.ow; ++i) bsum += gplane[i];
    grad_biases[co] += bsum;

    for (std::size_t ci = 0; ci < g.c_in; ++ci) {
      const double* iplane = in + ci * g.h * g.w;
      double* giplane = gi ? gi + ci * g.h * g.w : nullptr;
      const std::size_t kbase = (co * g.c_in + ci) * g.k * g.k;
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        const Range ry = valid_range(g.h, g.oh, ky, stride, pad);
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          const Range rx = valid_range(g.w, g.ow, kx, stride, pad);
          const double wv = wts[kbase + ky * g.k + kx];
          double wsum = 0.0;
          for (std::size_t oy = ry.lo; oy < ry.hi; ++oy) {
            const std::size_t irow = (oy * stride + ky - pad) * g.w;
            const double* grow = gplane + oy * g.ow;
            for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) {
              const std::size_t ix = irow + ox * stride + kx - pad;
              wsum += grow[ox] * iplane[ix];
            }
            if (giplane) {
              for (std::size_t ox = rx.lo; ox < rx.hi; ++ox) giplane[irow + ox * stride + kx - pad] += wv * grow[ox];
            }
          }
          grad_filters[kbase + ky * g.k + kx] += wsum;
        }
      }
    }
  }
}

PoolResult maxpool2(const Tensor& input) {
  if (input.rank() != 3) throw ShapeError("maxpool2: input must be [C, H, W]");
  const std::size_t c = input.extent(0), h = input.extent(1), w = input.extent(2);
  if (h % 2 != 0 || w % 2 != 0) {
    throw ShapeError("maxpool2: odd extent " + std::to_string(h) + "x" + std::to_string(w));
  }
  const std::size_t oh = h / 2, ow = w / 2;
  PoolResult r{Tensor({c, oh, ow}), std::vector<std::size_t>(c * oh * ow)};
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        std::size_t best = (ch * h + 2 * oy) * w + 2 * ox;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (ch * h + 2 * oy + dy) * w + 2 * ox + dx;
            if (input[idx] > input[best]) best = idx;
          }
        }
        const std::size_t o = (ch * oh + oy) * ow + ox;
        r.output[o] = input[best];
        r.argmax[o] = best;
      }
    }
  }
  return r;
}

Tensor maxpool2_backward(const Tensor& grad_output, std::span<const std::size_t> argmax,
                         const std::vector<std::size_t>& input_shape) {
  if (argmax.size() != grad_output.size()) throw ShapeError("maxpool2_backward: argmax size mismatch");
  Tensor gi(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) gi[argmax[o]] += grad_output[o];
  return gi;
}

Tensor relu(const Tensor& t) {
  Tensor out = t;
  for (auto& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

void relu_backward(std::span<double> grad, std::span<const double> output) {
  if (grad.size() != output.size()) throw ShapeError("relu_backward: size mismatch");
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(output[i] > 0.0)) grad[i] = 0.0;
  }
}

void dense(std::span<const double> x, const Tensor& weights, const Tensor& biases, std::span<double> y) {
  const std::size_t out = weights.extent(0), in = weights.extent(1);
  if (x.size() != in || y.size() != out || biases.size() != out) throw ShapeError("dense: shape mismatch");
  const double* w = weights.data().data();
  for (std::size_t r = 0; r < out; ++r) {
    const double* row = w + r * in;
    double acc = 0.0;
    for (std::size_t c = 0; c < in; ++c) acc += row[c] * x[c];
    y[r] = acc + biases[r];
  }
}

void dense_backward(std::span<const double> x, const Tensor& weights, std::span<const double> grad_y,
                    std::span<double> grad_weights, std::span<double> grad_biases, std::span<double> grad_x) {
  const std::size_t out = weights.extent(0), in = weights.extent(1);
  if (x.size() != in || grad_y.size() != out || grad_weights.size() != out * in || grad_biases.size() != out) {
    throw ShapeError("dense_backward: shape mismatch");
  }
  if (!grad_x.empty() && grad_x.size() != in) throw ShapeError("dense_backward: grad_x size mismatch");
  std::fill(grad_x.begin(), grad_x.end(), 0.0);
  const double* w = weights.data().data();
  for (std::size_t r = 0; r < out; ++r) {
    const double g = grad_y[r];
    grad_biases[r] += g;
    if (g == 0.0) continue;
    double* gw = grad_weights.data() + r * in;
    for (std::size_t c = 0; c < in; ++c) gw[c] += g * x[c];
    if (!grad_x.empty()) {
      const double* row = w + r * in;
      for (std::size_t c = 0; c < in; ++c) grad_x[c] += g * row[c];
    }
  }
}

std::array<double, 2> softmax2(std::array<double, 2> logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

double cross_entropy(std::array<double, 2> probs, int label) {
  if (label != 0 && label != 1) throw ShapeError("cross_entropy: label must be 0 or 1");
  return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-12));
}

}  // namespace qdn
