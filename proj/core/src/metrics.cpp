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

#include "qdn/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "qdn/error.hpp"

namespace qdn {

double mse(const Image& a, const Image& b) {
  require_same_shape(a, b, "mse");
  if (a.empty()) throw ShapeError("mse: empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double psnr_from_mse(double m, double max_val) {
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_val * max_val / m);
}

double psnr(const Image& a, const Image& b, double max_val) { return psnr_from_mse(mse(a, b), max_val); }

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b, "ssim");
  const std::size_t w = a.width, h = a.height, k = kSsimWindow;
  if (w < k || h < k) throw ShapeError("ssim: image smaller than the 8x8 window");

  constexpr double c1 = (0.01 * kMaxIntensity) * (0.01 * kMaxIntensity);
  constexpr double c2 = (0.03 * kMaxIntensity) * (0.03 * kMaxIntensity);
  const double inv_n = 1.0 / static_cast<double>(k * k);

  // Integer window sums stay exact, which keeps ssim(a, a) == 1 and the
  // result symmetric in (a, b) to the last bit.
  double total = 0.0;
  for (std::size_t y0 = 0; y0 + k <= h; ++y0) {
    for (std::size_t x0 = 0; x0 + k <= w; ++x0) {
      std::int64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t y = y0; y < y0 + k; ++y) {
        for (std::size_t x = x0; x < x0 + k; ++x) {
          const std::int64_t va = a.at(x, y), vb = b.at(x, y);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      }
      const double mu_a = sa * inv_n, mu_b = sb * inv_n;
      const double var_a = saa * inv_n - mu_a * mu_a;
      const double var_b = sbb * inv_n - mu_b * mu_b;
      const double cov = sab * inv_n - mu_a * mu_b;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
    }
  }
  return total / static_cast<double>((w - k + 1) * (h - k + 1));
}

QualityReport assess(const Image& reference, const Image& candidate) {
  QualityReport r;
  r.mse = mse(reference, candidate);
  r.psnr_db = psnr_from_mse(r.mse);
  r.ssim = ssim(reference, candidate);
  return r;
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace qdn
