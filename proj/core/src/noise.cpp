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

#include "qdn/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdn/error.hpp"
#include "qdn/random.hpp"

namespace qdn {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::depolarizing:
      return "depolarizing";
    case NoiseKind::gaussian:
      return "gaussian";
    case NoiseKind::salt_pepper:
      return "salt_pepper";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "depolarizing") return NoiseKind::depolarizing;
  if (name == "gaussian" || name == "gussian") return NoiseKind::gaussian;
  if (name == "salt_pepper") return NoiseKind::salt_pepper;
  throw ConfigError("unknown noise kind '" + std::string(name) + "'");
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
}

std::uint8_t to_pixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0)); }

}  // namespace

void NoiseSpec::validate() const {
  switch (kind) {
    case NoiseKind::depolarizing:
      check_probability(p, "depolarizing p");
      break;
    case NoiseKind::gaussian:
      if (!(sigma >= 0.0) || !std::isfinite(sigma) || !std::isfinite(mean)) {
        throw DomainError("gaussian noise needs finite mean and sigma >= 0");
      }
      break;
    case NoiseKind::salt_pepper:
      check_probability(density, "salt_pepper density");
      break;
  }
}

DensityMatrix depolarize_qubit(const DensityMatrix& rho, int k, double p) {
  check_probability(p, "depolarizing p");
  if (k < 0 || k >= rho.qubits()) {
    throw DomainError("depolarize: qubit " + std::to_string(k) + " out of range for " + std::to_string(rho.qubits()) +
                      " qubits");
  }
  const std::size_t d = rho.dim();
  const std::size_t mask = std::size_t{1} << k;
  const double keep = 1.0 - p;
  const double mix = p / 3.0;

  // Elementwise action of each conjugation, with m the qubit-k bit mask:
  //   X rho X : rho(i^m, j^m)
  //   Y rho Y : +rho(i^m, j^m) when b_i == b_j, else -rho(i^m, j^m)
  //   Z rho Z : +rho(i, j)     when b_i == b_j, else -rho(i, j)
  DensityMatrix out(rho.qubits());
  for (std::size_t i = 0; i < d; ++i) {
    const bool bi = (i & mask) != 0;
    for (std::size_t j = 0; j < d; ++j) {
      const bool same = bi == ((j & mask) != 0);
      const Complex r = rho(i, j);
      const Complex flipped = rho(i ^ mask, j ^ mask);
      const Complex xrx = flipped;
      const Complex yry = same ? flipped : -flipped;
      const Complex zrz = same ? r : -r;
      out(i, j) = keep * r + mix * (xrx + yry + zrz);
    }
  }
  return out;
}

DensityMatrix depolarize_all(const DensityMatrix& rho, double p) {
  check_probability(p, "depolarizing p");
  DensityMatrix out = rho;
  for (int k = 0; k < rho.qubits(); ++k) out = depolarize_qubit(out, k, p);
  return out;
}

Image gaussian_noise(const Image& image, double mean, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DomainError("gaussian noise: sigma must be >= 0");
  Rng rng(seed);
  Image out = image;
  for (auto& px : out.pixels) px = to_pixel(px + mean + sigma * rng.normal());
  return out;
}

Image salt_pepper(const Image& image, double density, std::uint64_t seed) {
  check_probability(density, "salt_pepper density");
  Rng rng(seed);
  Image out = image;
  for (auto& px : out.pixels) {
    if (rng.uniform() < density) px = rng.uniform() < 0.5 ? 0 : 255;
  }
  return out;
}

Image quantum_corrupt(const Image& image, double p, std::uint64_t /*seed*/) {
  QuantumImage q = encode(image);
  q.state = depolarize_all(q.state, p);
  return decode(q);
}

Image apply_noise(const Image& image, const NoiseSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case NoiseKind::depolarizing:
      return quantum_corrupt(image, spec.p, spec.seed);
    case NoiseKind::gaussian:
      return gaussian_noise(image, spec.mean, spec.sigma, spec.seed);
    case NoiseKind::salt_pepper:
      return salt_pepper(image, spec.density, spec.seed);
  }
  throw DomainError("apply_noise: unknown noise kind");
}

}  // namespace qdn
