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
#include <span>
#include <string_view>
#include <utility>

namespace qdn {

/// Portable counter-based generator.
///
/// The i-th output (i = 1, 2, ...) is splitmix64(seed + i * 0x9E3779B97F4A7C15),
/// so a stream is fully described by (seed, counter) and reproduces bit for bit
/// on every platform. All randomness in the project flows through this type;
/// the standard <random> distributions are avoided because their algorithms
/// are implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound). Unbiased (rejection sampling). bound > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller, one variate per call (cosine branch).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  /// Fisher-Yates, walking from the back.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Sub-seed for a named stage ("generate", "train", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

/// Sub-seed for the i-th item of a stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qdn
