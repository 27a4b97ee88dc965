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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdn/image.hpp"
#include "qdn/noise.hpp"

namespace qdn {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// One training example. Label 0 = classical/clean, 1 = quantum/noisy.
struct LabeledExample {
  Image image;
  int label = 0;
  /// Index shared by a clean image and its corrupted counterpart; -1 if unpaired.
  std::int64_t pair = -1;
  /// File the image was loaded from or written to; relative paths are resolved
  /// against the manifest directory. Empty for purely in-memory examples.
  std::string path;

  bool operator==(const LabeledExample&) const = default;
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;

  /// Throws DomainError unless all are >= 0 and they sum to 1 within 1e-9.
  void validate() const;
  bool operator==(const SplitRatios&) const = default;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
  bool operator==(const SplitSizes&) const = default;
};

/// floor(train * n), floor(validation * n), remainder to test.
SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios);

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  std::vector<LabeledExample> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  std::size_t size() const { return train.size() + validation.size() + test.size(); }
  bool operator==(const DatasetSplit&) const = default;
};

// IDX (MNIST) files: big-endian header, unsigned-byte payload.
std::vector<Image> read_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);
/// All images must share one size.
void write_idx_images(std::span<const Image> images, const std::filesystem::path& path);
void write_idx_labels(std::span<const std::uint8_t> labels, const std::filesystem::path& path);

// Binary "P5" portable graymap with maxval 255. Comments ('#') are skipped on read.
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const Image& image, const std::filesystem::path& path);
Image decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const Image& image);

/// Every *.pgm in `dir`, sorted by file name.
std::vector<Image> read_pgm_dir(const std::filesystem::path& dir);

/// For each clean image i emits (clean, label 0, pair i) followed by
/// (corrupted, label 1, pair i). Image i is corrupted with noise.seed replaced
/// by derive_seed(seed, i).
std::vector<LabeledExample> build_pairs(std::span<const Image> clean, const NoiseSpec& noise, std::uint64_t seed);

/// Stratified seeded split: each class is shuffled on its own, the classes are
/// interleaved round-robin (ascending label), and the interleaved sequence is
/// sliced by split_sizes().
DatasetSplit split(std::vector<LabeledExample> examples, const SplitRatios& ratios, std::uint64_t seed);
inline DatasetSplit split(std::vector<LabeledExample> examples, std::uint64_t seed) {
  return split(std::move(examples), SplitRatios{}, seed);
}

/// JSON manifest {format, seed, ratios, entries:[{path, label, subset, pair}]}.
/// Every example must carry a path. Keys of `extra` (e.g. a config echo) are
/// merged into the top-level object.
void write_manifest(const DatasetSplit& split, const std::filesystem::path& path,
                    const nlohmann::json& extra = nlohmann::json::object());

/// Loads every referenced image. Throws IoError for a missing file and
/// FormatError for a schema mismatch.
DatasetSplit read_manifest(const std::filesystem::path& path);

}  // namespace qdn
