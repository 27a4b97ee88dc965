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
#include <cmath>

#include <gtest/gtest.h>

#include "qdn/error.hpp"
#include "qdn/metrics.hpp"
#include "qdn/noise.hpp"
#include "test_util.hpp"

namespace qdn {
namespace {

std::uint8_t sorted_median(const Image& img, std::size_t x, std::size_t y) {
  std::vector<std::uint8_t> v;
  for (long dy = -1; dy <= 1; ++dy)
    for (long dx = -1; dx <= 1; ++dx) {
      const long cx = std::clamp<long>(static_cast<long>(x) + dx, 0, static_cast<long>(img.width) - 1);
      const long cy = std::clamp<long>(static_cast<long>(y) + dy, 0, static_cast<long>(img.height) - 1);
      v.push_back(img.at(static_cast<std::size_t>(cx), static_cast<std::size_t>(cy)));
    }
  std::sort(v.begin(), v.end());
  return v[4];
}

TEST(PatchGeometry, ModelSide) {
  EXPECT_EQ(patch_model_side(3), 4u);
  EXPECT_EQ(patch_model_side(5), 8u);
  EXPECT_EQ(patch_model_side(9), 12u);
  EXPECT_EQ(patch_model_side(12), 12u);
}

TEST(ExtractPatch, ReplicatesEdges) {
  const Image img(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  EXPECT_EQ(extract_patch(img, 1, 1, 3), img);
  EXPECT_EQ(extract_patch(img, 0, 0, 3), Image(3, 3, {1, 1, 2, 1, 1, 2, 4, 4, 5}));
  const Image big = extract_patch(img, 2, 2, 5);
  EXPECT_EQ(big.at(4, 4), 9);
  EXPECT_EQ(big.at(0, 0), 1);
  EXPECT_THROW(extract_patch(img, 1, 1, 4), ShapeError);
  EXPECT_THROW(extract_patch(img, 3, 0, 3), ShapeError);
  EXPECT_THROW(extract_patch(img, 1, 1, 7), ShapeError);
}

TEST(PadPatch, OneBeforeTwoAfter) {
  Image p(9, 9);
  for (std::size_t i = 0; i < p.size(); ++i) p.pixels[i] = static_cast<std::uint8_t>(i);
  const Image q = pad_patch(p, 12);
  ASSERT_EQ(q.width, 12u);
  EXPECT_EQ(q.at(0, 0), p.at(0, 0));
  EXPECT_EQ(q.at(1, 1), p.at(0, 0));
  EXPECT_EQ(q.at(5, 5), p.at(4, 4));
  EXPECT_EQ(q.at(11, 11), p.at(8, 8));
  EXPECT_EQ(q.at(9, 9), p.at(8, 8));
  EXPECT_EQ(q.at(11, 3), p.at(8, 2));
  EXPECT_THROW(pad_patch(p, 8), ShapeError);
}

TEST(EstimateValue, MatchesSortedMedian) {
  Rng rng(61);
  const Image img = testing::random_image(11, 7, rng);
  for (std::size_t y = 0; y < img.height; ++y)
    for (std::size_t x = 0; x < img.width; ++x) ASSERT_EQ(estimate_value(img, x, y), sorted_median(img, x, y));
}

TEST(ApplyThreshold, KeepsEstimateAtOrAboveThreshold) {
  const Image img(2, 1, {10, 30});
  const std::vector<double> c = {0.2, -0.4};
  EXPECT_EQ(apply_threshold(img, c, 0.2, Estimator::median3), Image(2, 1, {10, 0}));
  EXPECT_EQ(apply_threshold(img, c, -0.4, Estimator::median3), Image(2, 1, {10, 30}));
  EXPECT_EQ(apply_threshold(img, c, 0.3, Estimator::median3), Image(2, 1, {0, 0}));
  EXPECT_THROW(apply_threshold(img, std::vector<double>{0.0}, 0.0, Estimator::median3), ShapeError);
}

TEST(ApplyThreshold, MaskShrinksMonotonically) {
  Rng rng(62);
  const Image img = testing::random_image(9, 9, rng);
  std::vector<double> c(img.size());
  for (auto& v : c) v = 2.0 * rng.uniform() - 1.0;
  std::size_t prev = img.size() + 1;
  for (const double t : ThresholdGrid::standard().values) {
    const Image out = apply_threshold(img, c, t, Estimator::median3);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] >= t) {
        ++kept;
        ASSERT_EQ(out.pixels[i], sorted_median(img, i % 9, i / 9));
      } else {
        ASSERT_EQ(out.pixels[i], 0);
      }
    }
    ASSERT_LE(kept, prev);
    prev = kept;
  }
}

TEST(Denoise, ZeroModelGivesZeroConfidence) {
  Rng rng(63);
  const Image img = testing::random_image(6, 5, rng);
  const CnnModel m = CnnModel::zeros(12);
  DenoiseConfig cfg;
  const Image median = denoise(img, m, cfg);
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 6; ++x) EXPECT_EQ(median.at(x, y), sorted_median(img, x, y));
  cfg.threshold = 0.05;
  EXPECT_EQ(denoise(img, m, cfg), Image(6, 5, 0));
  EXPECT_THROW(confidence_map(img, CnnModel::zeros(8), 9), ShapeError);
}

TEST(PixelConfidence, PadsOrAcceptsModelSizedPatches) {
  Rng rng(64);
  const CnnModel m = CnnModel::initialized(12, 3);
  const Image p = testing::random_image(9, 9, rng);
  EXPECT_EQ(pixel_confidence(m, p), pixel_confidence(m, pad_patch(p, 12)));
  EXPECT_THROW(pixel_confidence(m, Image(5, 5)), ShapeError);
}

TEST(DenoiseConfig, Validation) {
  DenoiseConfig c;
  c.patch_size = 8;
  EXPECT_THROW(c.validate(), ConfigError);
  c.patch_size = 9;
  c.threshold = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_estimator("median3"), Estimator::median3);
  EXPECT_THROW(parse_estimator("mean"), ConfigError);
}

TEST(ThresholdGrid, StandardAndCustom) {
  const auto g = ThresholdGrid::standard();
  ASSERT_EQ(g.values.size(), 41u);
  EXPECT_EQ(g.values.front(), -1.0);
  EXPECT_EQ(g.values.back(), 1.0);
  EXPECT_EQ(g.values[26], 0.3);
  EXPECT_EQ(g.values[20], 0.0);
  EXPECT_EQ(ThresholdGrid::from({0.5, -0.5, 0.5}).values, (std::vector<double>{-0.5, 0.5}));
  EXPECT_THROW(ThresholdGrid::from({}), ConfigError);
  EXPECT_THROW(ThresholdGrid::from({2.0}), ConfigError);
  EXPECT_THROW(ThresholdGrid::range(0, 1, 0), ConfigError);
  EXPECT_EQ(ThresholdGrid::range(0, 1, 0.25).values, (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
}

std::vector<NoisyPair> noisy_pairs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NoisyPair> v;
  for (std::size_t i = 0; i < n; ++i) {
    Image clean(8, 8);
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t x = 0; x < 8; ++x) clean.at(x, y) = static_cast<std::uint8_t>(20 * x + 5 * y);
    v.push_back({salt_pepper(clean, 0.1, rng.next_u64()), clean});
  }
  return v;
}

TEST(SelectThreshold, BestEntryIsTableMinimumWithExhaustiveCheck) {
  const CnnModel m = CnnModel::initialized(8, 21);
  const auto pairs = noisy_pairs(2, 5);
  const ThresholdGrid grid = ThresholdGrid::range(-1.0, 1.0, 0.25);
  DenoiseConfig cfg;
  cfg.patch_size = 5;
  const ThresholdSelection sel = select_threshold(m, pairs, grid, cfg);
  ASSERT_EQ(sel.table.size(), grid.values.size());
  for (const auto& row : sel.table) {
    DenoiseConfig at = cfg;
    at.threshold = row.threshold;
    double sum = 0.0;
    for (const auto& p : pairs) sum += mse(denoise(p.noisy, m, at), p.original);
    EXPECT_EQ(row.mean_mse, sum / 2.0);
    EXPECT_GE(row.mean_mse, sel.best_mse);
  }
  const auto best = std::find_if(sel.table.begin(), sel.table.end(),
                                 [&](const ThresholdRow& r) { return r.mean_mse == sel.best_mse; });
  EXPECT_EQ(best->threshold, sel.best_threshold);
}

TEST(SelectThreshold, GridOrderDoesNotMatterAndTiesPickSmallest) {
  const auto pairs = noisy_pairs(1, 6);
  DenoiseConfig cfg;
  cfg.patch_size = 5;
  const CnnModel m = CnnModel::initialized(8, 22);
  const auto a = select_threshold(m, pairs, ThresholdGrid{{0.5, -0.5, 0.0, 1.0}}, cfg);
  const auto b = select_threshold(m, pairs, ThresholdGrid{{1.0, 0.0, -0.5, 0.5, 0.0}}, cfg);
  EXPECT_EQ(a.best_threshold, b.best_threshold);
  EXPECT_EQ(a.best_mse, b.best_mse);
  ASSERT_EQ(a.table.size(), b.table.size());

  // Zero model: every c is 0, so all T <= 0 tie and the smallest wins.
  const auto z = select_threshold(CnnModel::zeros(8), pairs, ThresholdGrid{{0.0, -0.5, -1.0}}, cfg);
  EXPECT_EQ(z.best_threshold, -1.0);
  EXPECT_THROW(select_threshold(m, {}, ThresholdGrid::standard(), cfg), DomainError);
}

TEST(SamplePatches, PairedCleanAndNoisyAtSameCenter) {
  const auto pairs = noisy_pairs(3, 7);
  const auto patches = sample_patches(pairs, 5, 4, 99);
  ASSERT_EQ(patches.size(), 24u);
  for (std::size_t i = 0; i < patches.size(); i += 2) {
    EXPECT_EQ(patches[i].label, 0);
    EXPECT_EQ(patches[i + 1].label, 1);
    EXPECT_EQ(patches[i].pair, patches[i + 1].pair);
    EXPECT_EQ(patches[i].image.width, 8u);
  }
  EXPECT_EQ(patches, sample_patches(pairs, 5, 4, 99));
  EXPECT_NE(patches, sample_patches(pairs, 5, 4, 100));
}

}  // namespace
}  // namespace qdn
