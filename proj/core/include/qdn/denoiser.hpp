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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qdn/cnn.hpp"
#include "qdn/datasets.hpp"
#include "qdn/image.hpp"

namespace qdn {

/// How a pixel that passes the confidence threshold gets its value.
enum class Estimator { median3 };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct DenoiseConfig {
  /// Odd patch side k fed to the classifier (after padding to patch_model_side(k)).
  std::size_t patch_size = 9;
  /// Pixels with confidence c >= threshold receive an estimate; the rest become 0.
  double threshold = 0.0;
  Estimator estimator = Estimator::median3;

  /// Throws ConfigError unless k is odd, k >= 3 and -1 <= threshold <= 1.
  void validate() const;
};

/// Smallest multiple of 4 that is >= k (9 -> 12).
std::size_t patch_model_side(std::size_t k);

/// Strictly ascending candidate thresholds in [-1, 1].
struct ThresholdGrid {
  std::vector<double> values;

  /// Sorts and de-duplicates; throws ConfigError when empty or out of range.
  static ThresholdGrid from(std::vector<double> values);
  /// -1.0, -0.95, ..., 1.0 (41 values).
  static ThresholdGrid standard();
  /// start, start + step, ... while <= stop (within 1e-9); values are computed as start + i * step.
  static ThresholdGrid range(double start, double stop, double step);
};

/// k x k window centered at (x, y); samples outside the image replicate the nearest edge.
/// Throws ShapeError when k is even or k > 2 * min(width, height).
Image extract_patch(const Image& image, std::size_t x, std::size_t y, std::size_t k);

/// Grows a k x k patch to side x side by edge replication: floor((side-k)/2)
/// extra rows/columns before, the rest after.
Image pad_patch(const Image& patch, std::size_t side);

/// c = P_q - P_c for one patch. The patch may already be model.n wide or be a
/// k x k patch with patch_model_side(k) == model.n. Throws ShapeError otherwise.
double pixel_confidence(const CnnModel& model, const Image& patch);

/// Median of the 3x3 edge-replicated neighborhood of (x, y).
std::uint8_t estimate_value(const Image& image, std::size_t x, std::size_t y);

/// Per-pixel confidence for every pixel of `image`, row-major.
std::vector<double> confidence_map(const Image& image, const CnnModel& model, std::size_t patch_size);

/// Thresholding step given a precomputed confidence map.
Image apply_threshold(const Image& image, std::span<const double> confidence, double threshold, Estimator estimator);

/// For every pixel: c >= T -> estimate, c < T -> 0. Dimensions are preserved.
Image denoise(const Image& image, const CnnModel& model, const DenoiseConfig& cfg);

struct NoisyPair {
  Image noisy;
  Image original;
};

struct ThresholdRow {
  double threshold = 0.0;
  double mean_mse = 0.0;
};

struct ThresholdSelection {
  double best_threshold = 0.0;
  double best_mse = 0.0;
  /// One row per grid value, ascending.
  std::vector<ThresholdRow> table;
};

/// Grid search for the threshold minimizing mean MSE(denoise(noisy), original).
/// Ties go to the smallest threshold. cfg.threshold is ignored.
ThresholdSelection select_threshold(const CnnModel& model, std::span<const NoisyPair> pairs,
                                    const ThresholdGrid& grid, const DenoiseConfig& cfg);

/// Patch training set for the denoising classifier: `per_image` random centers
/// per pair, the clean patch labelled 0 and the noisy patch at the same center
/// labelled 1, both padded to patch_model_side(k).
std::vector<LabeledExample> sample_patches(std::span<const NoisyPair> pairs, std::size_t k, std::size_t per_image,
                                           std::uint64_t seed);

}  // namespace qdn
