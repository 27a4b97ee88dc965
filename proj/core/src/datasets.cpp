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

#include "qdn/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "qdn/error.hpp"
#include "qdn/random.hpp"

namespace qdn {
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t offset) {
  return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
         (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex32(std::uint32_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s = "0x";
  for (int shift = 28; shift >= 0; shift -= 4) s += digits[(v >> shift) & 0xF];
  return s;
}

}  // namespace

std::vector<Image> read_idx_images(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 16) throw LengthError(path.string() + ": IDX header truncated");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxImageMagic) {
    throw FormatError(path.string() + ": bad IDX image magic " + hex32(magic) + " (want 0x00000803)");
  }
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  const std::size_t per_image = rows * cols;
  if (bytes.size() - 16 < count * per_image) {
    throw LengthError(path.string() + ": payload holds " + std::to_string(bytes.size() - 16) + " bytes, header needs " +
                      std::to_string(count * per_image));
  }
  std::vector<Image> images;
  images.reserve(count);
  auto it = bytes.begin() + 16;
  for (std::size_t i = 0; i < count; ++i) {
    images.emplace_back(cols, rows, std::vector<std::uint8_t>(it, it + static_cast<std::ptrdiff_t>(per_image)));
    it += static_cast<std::ptrdiff_t>(per_image);
  }
  return images;
}

std::vector<std::uint8_t> read_idx_labels(const fs::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 8) throw LengthError(path.string() + ": IDX header truncated");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxLabelMagic) {
    throw FormatError(path.string() + ": bad IDX label magic " + hex32(magic) + " (want 0x00000801)");
  }
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() - 8 < count) throw LengthError(path.string() + ": label payload truncated");
  return {bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count)};
}

void write_idx_images(std::span<const Image> images, const fs::path& path) {
  const std::size_t rows = images.empty() ? 0 : images.front().height;
  const std::size_t cols = images.empty() ? 0 : images.front().width;
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.size() * rows * cols);
  append_be32(out, kIdxImageMagic);
  append_be32(out, static_cast<std::uint32_t>(images.size()));
  append_be32(out, static_cast<std::uint32_t>(rows));
  append_be32(out, static_cast<std::uint32_t>(cols));
  for (const auto& img : images) {
    if (img.height != rows || img.width != cols) throw ShapeError("write_idx_images: images differ in size");
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  }
  write_bytes(path, out);
}

void write_idx_labels(std::span<const std::uint8_t> labels, const fs::path& path) {
  std::vector<std::uint8_t> out;
  append_be32(out, kIdxLabelMagic);
  append_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  write_bytes(path, out);
}

// ---- PGM ----

Image decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* field) {
    skip_space_and_comments();
    std::size_t v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    if (pos == start) throw FormatError(std::string("pgm: missing ") + field);
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("pgm: not a netpbm file");
  if (bytes[1] != '5') throw FormatError(std::string("pgm: unsupported variant P") + static_cast<char>(bytes[1]));
  pos = 2;
  const std::size_t width = read_uint("width");
  const std::size_t height = read_uint("height");
  const std::size_t maxval = read_uint("maxval");
  if (maxval != 255) throw FormatError("pgm: maxval " + std::to_string(maxval) + " unsupported (want 255)");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("pgm: missing separator after maxval");
  ++pos;
  const std::size_t n = width * height;
  if (bytes.size() - pos < n) {
    throw LengthError("pgm: payload holds " + std::to_string(bytes.size() - pos) + " bytes, need " + std::to_string(n));
  }
  return Image(width, height, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                                        bytes.begin() + static_cast<std::ptrdiff_t>(pos + n)));
}

std::vector<std::uint8_t> encode_pgm(const Image& image) {
  const std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

Image read_pgm(const fs::path& path) {
  try {
    return decode_pgm(read_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const LengthError& e) {
    throw LengthError(path.string() + ": " + e.what());
  }
}

void write_pgm(const Image& image, const fs::path& path) { write_bytes(path, encode_pgm(image)); }

std::vector<Image> read_pgm_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Image> images;
  images.reserve(files.size());
  for (const auto& f : files) images.push_back(read_pgm(f));
  return images;
}

// ---- pairing and splitting ----

std::vector<LabeledExample> build_pairs(std::span<const Image> clean, const NoiseSpec& noise, std::uint64_t seed) {
  noise.validate();
  std::vector<LabeledExample> out;
  out.reserve(2 * clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    NoiseSpec spec = noise;
    spec.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    const auto pair = static_cast<std::int64_t>(i);
    out.push_back({clean[i], 0, pair, {}});
    out.push_back({apply_noise(clean[i], spec), 1, pair, {}});
  }
  return out;
}

void SplitRatios::validate() const {
  if (!(train >= 0.0 && validation >= 0.0 && test >= 0.0)) throw DomainError("split ratios must be non-negative");
  if (std::abs(train + validation + test - 1.0) > 1e-9) throw DomainError("split ratios must sum to 1");
}

SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios) {
  ratios.validate();
  // The 1e-9 slack keeps products like 0.29 * 100 = 28.999... on the intended side of floor.
  const auto floor_of = [n](double r) {
    return std::min(n, static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9)));
  };
  SplitSizes s;
  s.train = floor_of(ratios.train);
  s.validation = std::min(n - s.train, floor_of(ratios.validation));
  s.test = n - s.train - s.validation;
  return s;
}

DatasetSplit split(std::vector<LabeledExample> examples, const SplitRatios& ratios, std::uint64_t seed) {
  if (examples.empty()) throw DomainError("split: no examples");
  const SplitSizes sizes = split_sizes(examples.size(), ratios);

  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < examples.size(); ++i) by_label[examples[i].label].push_back(i);

  Rng rng(seed);
  for (auto& [label, idx] : by_label) rng.shuffle(std::span<std::size_t>(idx));

  std::vector<std::size_t> order;
  order.reserve(examples.size());
  for (std::size_t round = 0; order.size() < examples.size(); ++round) {
    for (const auto& [label, idx] : by_label) {
      if (round < idx.size()) order.push_back(idx[round]);
    }
  }

  DatasetSplit out;
  out.seed = seed;
  out.ratios = ratios;
  out.train.reserve(sizes.train);
  out.validation.reserve(sizes.validation);
  out.test.reserve(sizes.test);
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& dst = k < sizes.train ? out.train : (k < sizes.train + sizes.validation ? out.validation : out.test);
    dst.push_back(std::move(examples[order[k]]));
  }
  return out;
}

// ---- manifest ----

namespace {
constexpr const char* kManifestFormat = "qdn-manifest/1";
}

void write_manifest(const DatasetSplit& split, const fs::path& path, const nlohmann::json& extra) {
  nlohmann::json doc = extra.is_object() ? extra : nlohmann::json::object();
  doc["format"] = kManifestFormat;
  doc["seed"] = split.seed;
  doc["ratios"] = {split.ratios.train, split.ratios.validation, split.ratios.test};
  auto& entries = doc["entries"] = nlohmann::json::array();
  const auto emit = [&](const std::vector<LabeledExample>& subset, const char* name) {
    for (const auto& ex : subset) {
      if (ex.path.empty()) throw IoError("write_manifest: example without a file path");
      entries.push_back({{"path", ex.path}, {"label", ex.label}, {"subset", name}, {"pair", ex.pair}});
    }
  };
  emit(split.train, "train");
  emit(split.validation, "validation");
  emit(split.test, "test");

  const std::string text = doc.dump(2) + "\n";
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

DatasetSplit read_manifest(const fs::path& path) {
  const auto bytes = read_bytes(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  try {
    if (doc.at("format").get<std::string>() != kManifestFormat) {
      throw FormatError(path.string() + ": unsupported manifest format " + doc.at("format").dump());
    }
    DatasetSplit out;
    out.seed = doc.at("seed").get<std::uint64_t>();
    const auto& r = doc.at("ratios");
    if (!r.is_array() || r.size() != 3) throw FormatError(path.string() + ": ratios must be a 3-element array");
    out.ratios = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>()};
    for (const auto& e : doc.at("entries")) {
      LabeledExample ex;
      ex.path = e.at("path").get<std::string>();
      ex.label = e.at("label").get<int>();
      ex.pair = e.value("pair", std::int64_t{-1});
      const fs::path file = fs::path(ex.path).is_absolute() ? fs::path(ex.path) : base / ex.path;
      if (!fs::exists(file)) throw IoError(path.string() + ": referenced file " + file.string() + " does not exist");
      ex.image = read_pgm(file);
      const auto subset = e.at("subset").get<std::string>();
      if (subset == "train") {
        out.train.push_back(std::move(ex));
      } else if (subset == "validation") {
        out.validation.push_back(std::move(ex));
      } else if (subset == "test") {
        out.test.push_back(std::move(ex));
      } else {
        throw FormatError(path.string() + ": unknown subset '" + subset + "'");
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": manifest schema mismatch: " + e.what());
  }
}

}  // namespace qdn
