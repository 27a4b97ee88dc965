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

#include "qdn/denoiser.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "qdn/error.hpp"
#include "qdn/metrics.hpp"
#include "qdn/random.hpp"

namespace qdn {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::median3:
      return "median3";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "median3") return Estimator::median3;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

void DenoiseConfig::validate() const {
  if (patch_size < 3 || patch_size % 2 == 0) {
    throw ConfigError("denoise: patch_size must be odd and >= 3, got " + std::to_string(patch_size));
  }
  if (!(threshold >= -1.0 && threshold <= 1.0)) throw ConfigError("denoise: threshold must lie in [-1, 1]");
}

std::size_t patch_model_side(std::size_t k) { return (k + 3) / 4 * 4; }

ThresholdGrid ThresholdGrid::from(std::vector<double> values) {
  if (values.empty()) throw ConfigError("threshold grid is empty");
  for (const double v : values) {
    if (!(v >= -1.0 && v <= 1.0)) throw ConfigError("threshold grid value " + std::to_string(v) + " outside [-1, 1]");
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return ThresholdGrid{std::move(values)};
}

ThresholdGrid ThresholdGrid::range(double start, double stop, double step) {
  if (!(step > 0.0)) throw ConfigError("threshold grid step must be positive");
  std::vector<double> v;
  for (std::size_t i = 0;; ++i) {
    const double t = start + static_cast<double>(i) * step;
    if (t > stop + 1e-9) break;
    // Snap float drift such as 0.30000000000000004 onto the intended decimal.
    v.push_back(std::clamp(std::round(t * 1e9) / 1e9, -1.0, 1.0));
  }
  return from(std::move(v));
}

ThresholdGrid ThresholdGrid::standard() { return range(-1.0, 1.0, 0.05); }

Image extract_patch(const Image& image, std::size_t x, std::size_t y, std::size_t k) {
  if (k % 2 == 0) throw ShapeError("extract_patch: k must be odd");
  if (k > 2 * std::min(image.width, image.height)) throw ShapeError("extract_patch: k larger than twice the image");
  if (x >= image.width || y >= image.height) throw ShapeError("extract_patch: center outside the image");
  const long r = static_cast<long>(k / 2);
  Image p(k, k);
  for (std::size_t dy = 0; dy < k; ++dy) {
    for (std::size_t dx = 0; dx < k; ++dx) {
      p.at(dx, dy) = image.clamped(static_cast<long>(x) + static_cast<long>(dx) - r,
                                   static_cast<long>(y) + static_cast<long>(dy) - r);
    }
  }
  return p;
}

Image pad_patch(const Image& patch, std::size_t side) {
  if (patch.width != patch.height) throw ShapeError("pad_patch: patch must be square");
  if (side < patch.width) throw ShapeError("pad_patch: target smaller than patch");
  if (side == patch.width) return patch;
  const long before = static_cast<long>((side - patch.width) / 2);
  Image out(side, side);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x)
      out.at(x, y) = patch.clamped(static_cast<long>(x) - before, static_cast<long>(y) - before);
  return out;
}

double pixel_confidence(const CnnModel& model, const Image& patch) {
  if (patch.width == model.n && patch.height == model.n) return forward(model, patch).confidence();
  if (patch.width != patch.height || patch_model_side(patch.width) != model.n) {
    throw ShapeError("pixel_confidence: " + std::to_string(patch.width) + "x" + std::to_string(patch.height) +
                     " patch does not fit a model with input side " + std::to_string(model.n));
  }
  return forward(model, pad_patch(patch, model.n)).confidence();
}

std::uint8_t estimate_value(const Image& image, std::size_t x, std::size_t y) {
  std::array<std::uint8_t, 9> v{};
  std::size_t i = 0;
  for (long dy = -1; dy <= 1; ++dy)
    for (long dx = -1; dx <= 1; ++dx)
      v[i++] = image.clamped(static_cast<long>(x) + dx, static_cast<long>(y) + dy);
  std::nth_element(v.begin(), v.begin() + 4, v.end());
  return v[4];
}

std::vector<double> confidence_map(const Image& image, const CnnModel& model, std::size_t patch_size) {
  if (patch_model_side(patch_size) != model.n) {
    throw ShapeError("denoise: patch size " + std::to_string(patch_size) + " needs a model with input side " +
                     std::to_string(patch_model_side(patch_size)) + ", got " + std::to_string(model.n));
  }
  std::vector<double> c(image.size());
  for (std::size_t y = 0; y < image.height; ++y)
    for (std::size_t x = 0; x < image.width; ++x)
      c[y * image.width + x] = pixel_confidence(model, extract_patch(image, x, y, patch_size));
  return c;
}

Image apply_threshold(const Image& image, std::span<const double> confidence, double threshold, Estimator estimator) {
  if (confidence.size() != image.size()) throw ShapeError("apply_threshold: confidence map size mismatch");
  Image out(image.width, image.height);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      const std::size_t i = y * image.width + x;
      if (confidence[i] >= threshold) {
        switch (estimator) {
          case Estimator::median3:
            out.pixels[i] = estimate_value(image, x, y);
            break;
        }
      }
    }
  }
  return out;
}

Image denoise(const Image& image, const CnnModel& model, const DenoiseConfig& cfg) {
  cfg.validate();
  return apply_threshold(image, confidence_map(image, model, cfg.patch_size), cfg.threshold, cfg.estimator);
}

ThresholdSelection select_threshold(const CnnModel& model, std::span<const NoisyPair> pairs,
                                    const ThresholdGrid& grid, const DenoiseConfig& cfg) {
  if (pairs.empty()) throw DomainError("select_threshold: no validation pairs");
  const ThresholdGrid sorted = ThresholdGrid::from(grid.values);
  DenoiseConfig probe = cfg;
  probe.threshold = 0.0;
  probe.validate();

  // The confidence map does not depend on T, so it is computed once per pair.
  std::vector<std::vector<double>> maps;
  maps.reserve(pairs.size());
  for (const auto& p : pairs) {
    require_same_shape(p.noisy, p.original, "select_threshold");
    maps.push_back(confidence_map(p.noisy, model, cfg.patch_size));
  }

  ThresholdSelection sel;
  sel.best_mse = std::numeric_limits<double>::infinity();
  for (const double t : sorted.values) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      sum += mse(apply_threshold(pairs[i].noisy, maps[i], t, cfg.estimator), pairs[i].original);
    }
    const double mean = sum / static_cast<double>(pairs.size());
    sel.table.push_back({t, mean});
    if (mean < sel.best_mse) {
      sel.best_mse = mean;
      sel.best_threshold = t;
    }
  }
  return sel;
}

std::vector<LabeledExample> sample_patches(std::span<const NoisyPair> pairs, std::size_t k, std::size_t per_image,
                                           std::uint64_t seed) {
  const std::size_t side = patch_model_side(k);
  std::vector<LabeledExample> out;
  out.reserve(2 * pairs.size() * per_image);
  Rng rng(seed);
  std::int64_t pair_id = 0;
  for (const auto& p : pairs) {
    require_same_shape(p.noisy, p.original, "sample_patches");
    for (std::size_t j = 0; j < per_image; ++j, ++pair_id) {
      const auto x = static_cast<std::size_t>(rng.below(p.original.width));
      const auto y = static_cast<std::size_t>(rng.below(p.original.height));
      out.push_back({pad_patch(extract_patch(p.original, x, y, k), side), 0, pair_id, {}});
      out.push_back({pad_patch(extract_patch(p.noisy, x, y, k), side), 1, pair_id, {}});
    }
  }
  return out;
}

}  // namespace qdn
