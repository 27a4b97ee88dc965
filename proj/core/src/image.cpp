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

#include "qdn/image.hpp"

#include <algorithm>
#include <string>

#include "qdn/error.hpp"

namespace qdn {

Image::Image(std::size_t w, std::size_t h, std::uint8_t fill) : width(w), height(h), pixels(w * h, fill) {}

Image::Image(std::size_t w, std::size_t h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
  if (pixels.size() != w * h) {
    throw ShapeError("image: " + std::to_string(pixels.size()) + " pixels for " + std::to_string(w) + "x" +
                     std::to_string(h));
  }
}

std::uint8_t Image::clamped(long x, long y) const {
  x = std::clamp(x, 0L, static_cast<long>(width) - 1);
  y = std::clamp(y, 0L, static_cast<long>(height) - 1);
  return pixels[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)];
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (a.width != b.width || a.height != b.height) {
    throw ShapeError(std::string(what) + ": image dimensions differ (" + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" + std::to_string(b.height) +
                     ")");
  }
}

}  // namespace qdn
