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
#include <vector>

namespace qdn {

/// 8-bit grayscale image, row-major.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, std::uint8_t fill = 0);
  /// Throws ShapeError unless pixels.size() == w * h.
  Image(std::size_t w, std::size_t h, std::vector<std::uint8_t> px);

  std::size_t size() const { return pixels.size(); }
  bool empty() const { return pixels.empty(); }

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }

  /// Edge-replicated read: coordinates are clamped into the image.
  std::uint8_t clamped(long x, long y) const;

  bool operator==(const Image&) const = default;
};

/// Throws ShapeError when the two images differ in width or height.
void require_same_shape(const Image& a, const Image& b, const char* what);

}  // namespace qdn
