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
#include <string>
#include <string_view>

#include "qdn/image.hpp"
#include "qdn/quantum_image.hpp"

namespace qdn {

enum class NoiseKind { depolarizing, gaussian, salt_pepper };

std::string_view to_string(NoiseKind kind);
/// Accepts "depolarizing", "gaussian" (and the misspelling "gussian"), "salt_pepper".
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::depolarizing;
  /// Depolarizing probability per qubit.
  double p = 0.1;
  /// Gaussian parameters, intensity units.
  double mean = 0.0;
  double sigma = 0.0;
  /// Fraction of pixels hit by salt-and-pepper.
  double density = 0.0;
  std::uint64_t seed = 0;

  /// Throws DomainError when the parameters of the selected kind are out of range.
  void validate() const;
};

/// E(rho) = (1 - p) rho + (p / 3) (X rho X + Y rho Y + Z rho Z) with the Paulis
/// acting on qubit `k` (bit k of the basis index, qubit 0 = least significant).
DensityMatrix depolarize_qubit(const DensityMatrix& rho, int k, double p);

/// depolarize_qubit on qubits 0, 1, ..., q-1 in that order.
DensityMatrix depolarize_all(const DensityMatrix& rho, double p = 0.1);

/// Adds round(mean + sigma * N(0,1)) per pixel, clamped to [0,255].
Image gaussian_noise(const Image& image, double mean, double sigma, std::uint64_t seed);

/// Each pixel is hit with probability `density`; hits become 0 or 255 with equal odds.
Image salt_pepper(const Image& image, double density, std::uint64_t seed);

/// decode(depolarize_all(encode(image), p)). The channel is evolved exactly,
/// so the result does not depend on `seed`; it is accepted for interface symmetry.
Image quantum_corrupt(const Image& image, double p, std::uint64_t seed = 0);

/// Dispatches on spec.kind using spec.seed.
Image apply_noise(const Image& image, const NoiseSpec& spec);

}  // namespace qdn
