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

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qdn/image.hpp"

namespace qdn {

using Complex = std::complex<double>;

/// Dense density matrices are capped at 12 qubits (4096 x 4096 complex, 256 MiB).
inline constexpr int kMaxDenseQubits = 12;

/// Smallest q with 2^q >= n_pixels; 0 for a single pixel.
int qubit_count(std::size_t n_pixels);

/// Normalized amplitude vector of length 2^qubits.
struct StateVector {
  std::vector<Complex> amplitudes;
  int qubits = 0;
  /// Euclidean norm of the original (unnormalized) intensity vector.
  double norm_scale = 1.0;
};

/// Dense 2^q x 2^q complex matrix, row-major.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Zero matrix on `qubits` qubits. Throws DomainError above kMaxDenseQubits.
  explicit DensityMatrix(int qubits);
  /// Takes ownership of row-major entries; throws ShapeError on size mismatch.
  DensityMatrix(int qubits, std::vector<Complex> entries);

  /// |psi><psi|
  static DensityMatrix pure(std::span<const Complex> amplitudes);
  /// I / 2^q
  static DensityMatrix maximally_mixed(int qubits);

  int qubits() const { return qubits_; }
  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) { return entries_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }

  std::span<const Complex> entries() const { return entries_; }
  std::span<Complex> entries() { return entries_; }

  Complex trace() const;
  /// tr(rho^2)
  double purity() const;
  std::vector<double> diagonal() const;

  /// Largest elementwise |a - b|; throws ShapeError on size mismatch.
  double max_abs_diff(const DensityMatrix& other) const;

 private:
  int qubits_ = 0;
  std::size_t dim_ = 1;
  std::vector<Complex> entries_ = {Complex{0.0, 0.0}};
};

/// Amplitude-encoded image held as a density matrix.
struct QuantumImage {
  DensityMatrix state;
  std::size_t width = 0;
  std::size_t height = 0;
  double norm_scale = 1.0;
  /// Number of zero amplitudes appended after the last pixel.
  std::size_t pad_length = 0;
};

/// Row-major flatten, zero-pad to 2^q, divide by the Euclidean norm.
/// Throws DomainError for an all-zero image or more than kMaxDenseQubits qubits.
StateVector amplitude_encode(const Image& image);

/// amplitude_encode followed by the outer product |psi><psi|.
QuantumImage encode(const Image& image);

/// pixel_i = clamp(round(sqrt(max(rho_ii, 0)) * norm_scale), 0, 255); padded slots dropped.
Image decode(const QuantumImage& qimg);

struct Diagnostics {
  /// max |rho_ij - conj(rho_ji)|
  double hermiticity_deviation = 0.0;
  /// |tr(rho) - 1|
  double trace_deviation = 0.0;
  /// Smallest eigenvalue of the Hermitian part; only computed for <= 10 qubits.
  std::optional<double> min_eigenvalue;

  bool valid(double tol = 1e-10, double eig_tol = 1e-8) const;
};

inline constexpr int kMaxEigenQubits = 10;

/// Throws ShapeError unless entries.size() == dim * dim with dim a power of two.
Diagnostics validate(std::size_t dim, std::span<const Complex> entries);
Diagnostics validate(const DensityMatrix& rho);

/// Plain-text dump: a "dim N" line, then one row per line of "re,im" pairs.
void write_matrix_text(const DensityMatrix& rho, std::ostream& out);

}  // namespace qdn
