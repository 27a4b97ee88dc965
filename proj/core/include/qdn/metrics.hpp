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
#include <string>

#include "qdn/image.hpp"

namespace qdn {

inline constexpr double kMaxIntensity = 255.0;
inline constexpr std::size_t kSsimWindow = 8;

/// Mean of squared pixel differences. Throws ShapeError on mismatched dimensions.
double mse(const Image& a, const Image& b);

/// 10 log10(max_val^2 / mse); +infinity when mse == 0.
double psnr_from_mse(double mse, double max_val = kMaxIntensity);
double psnr(const Image& a, const Image& b, double max_val = kMaxIntensity);

/// Mean SSIM over every 8x8 window (stride 1, uniform weights, population
/// statistics) with C1 = (0.01 * 255)^2 and C2 = (0.03 * 255)^2.
/// Throws ShapeError when either side is smaller than the window.
double ssim(const Image& a, const Image& b);

struct QualityReport {
  double mse = 0.0;
  /// +infinity for identical images.
  double psnr_db = 0.0;
  double ssim = 1.0;
};

QualityReport assess(const Image& reference, const Image& candidate);

/// "inf" for infinity, otherwise shortest round-trip decimal.
std::string format_metric(double v);

}  // namespace qdn
