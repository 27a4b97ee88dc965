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
#include <vector>

#include "qdn/cnn.hpp"
#include "qdn/optim.hpp"
#include "qdn/train.hpp"

namespace qdn {

/// Everything needed to resume or reuse a trained classifier.
///
/// Binary layout (all integers little-endian, doubles as IEEE-754 bit patterns):
///   8 bytes  "QDNCKPT1"
///   u64      n
///   u64 epochs, u64 batch_size, f64 lr, f64 beta1, f64 beta2, f64 epsilon, u64 seed
///   u64      adam step t
///   8 x tensor: u64 rank, rank x u64 extents, extent-product x f64
///   8 x f64 array (first moments), 8 x f64 array (second moments): u64 count, values
struct Checkpoint {
  CnnModel model;
  AdamState optimizer;
  TrainConfig config;

  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
/// Throws FormatError on a bad tag or inconsistent shapes, LengthError on truncation.
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qdn
