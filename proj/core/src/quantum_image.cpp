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

#include "qdn/quantum_image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "qdn/error.hpp"

namespace qdn {

int qubit_count(std::size_t n_pixels) {
  if (n_pixels <= 1) return 0;
  return static_cast<int>(std::bit_width(n_pixels - 1));
}

namespace {

void check_qubits(int qubits) {
  if (qubits < 0 || qubits > kMaxDenseQubits) {
    throw DomainError("density matrix: " + std::to_string(qubits) + " qubits exceeds the dense limit of " +
                      std::to_string(kMaxDenseQubits));
  }
}

}  // namespace

DensityMatrix::DensityMatrix(int qubits) : qubits_(qubits) {
  check_qubits(qubits);
  dim_ = std::size_t{1} << qubits;
  entries_.assign(dim_ * dim_, Complex{0.0, 0.0});
}

DensityMatrix::DensityMatrix(int qubits, std::vector<Complex> entries) : qubits_(qubits) {
  check_qubits(qubits);
  dim_ = std::size_t{1} << qubits;
  if (entries.size() != dim_ * dim_) {
    throw ShapeError("density matrix: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                     std::to_string(entries.size()));
  }
  entries_ = std::move(entries);
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> amplitudes) {
  if (!std::has_single_bit(amplitudes.size())) {
    throw ShapeError("pure state: amplitude count " + std::to_string(amplitudes.size()) + " is not a power of two");
  }
  DensityMatrix rho(std::countr_zero(amplitudes.size()));
  const std::size_t d = rho.dim();
  for (std::size_t r = 0; r < d; ++r) {
    const Complex a = amplitudes[r];
    if (a == Complex{}) continue;
    for (std::size_t c = 0; c < d; ++c) rho(r, c) = a * std::conj(amplitudes[c]);
  }
  return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(int qubits) {
  DensityMatrix rho(qubits);
  const double w = 1.0 / static_cast<double>(rho.dim());
  for (std::size_t i = 0; i < rho.dim(); ++i) rho(i, i) = w;
  return rho;
}

Complex DensityMatrix::trace() const {
  Complex t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double DensityMatrix::purity() const {
  // tr(rho^2) = sum_ij rho_ij rho_ji
  Complex s{};
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(j, i);
  return s.real();
}

std::vector<double> DensityMatrix::diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = (*this)(i, i).real();
  return d;
}

double DensityMatrix::max_abs_diff(const DensityMatrix& other) const {
  if (other.dim_ != dim_) throw ShapeError("density matrix: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) m = std::max(m, std::abs(entries_[i] - other.entries_[i]));
  return m;
}

StateVector amplitude_encode(const Image& image) {
  if (image.empty()) throw DomainError("encode: empty image");
  const int q = qubit_count(image.size());
  check_qubits(q);

  double sum_sq = 0.0;
  for (const auto v : image.pixels) sum_sq += static_cast<double>(v) * v;
  if (sum_sq == 0.0) throw DomainError("encode: all-zero image has no normalized amplitude state");

  StateVector sv;
  sv.qubits = q;
  sv.norm_scale = std::sqrt(sum_sq);
  sv.amplitudes.assign(std::size_t{1} << q, Complex{});
  for (std::size_t i = 0; i < image.size(); ++i) sv.amplitudes[i] = image.pixels[i] / sv.norm_scale;
  return sv;
}

QuantumImage encode(const Image& image) {
  const StateVector sv = amplitude_encode(image);
  QuantumImage q;
  q.state = DensityMatrix::pure(sv.amplitudes);
  q.width = image.width;
  q.height = image.height;
  q.norm_scale = sv.norm_scale;
  q.pad_length = sv.amplitudes.size() - image.size();
  return q;
}

Image decode(const QuantumImage& qimg) {
  const std::size_t n = qimg.width * qimg.height;
  if (n + qimg.pad_length != qimg.state.dim()) {
    throw ShapeError("decode: " + std::to_string(qimg.width) + "x" + std::to_string(qimg.height) +
                     " image does not fit a state of dimension " + std::to_string(qimg.state.dim()));
  }
  Image out(qimg.width, qimg.height);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::max(qimg.state(i, i).real(), 0.0);
    const double v = std::round(std::sqrt(p) * qimg.norm_scale);
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

bool Diagnostics::valid(double tol, double eig_tol) const {
  if (hermiticity_deviation > tol || trace_deviation > tol) return false;
  return !min_eigenvalue || *min_eigenvalue >= -eig_tol;
}

Diagnostics validate(std::size_t dim, std::span<const Complex> entries) {
  if (!std::has_single_bit(dim) || entries.size() != dim * dim) {
    throw ShapeError("validate: need a square matrix with power-of-two side, got " + std::to_string(entries.size()) +
                     " entries for side " + std::to_string(dim));
  }
  Diagnostics d;
  Complex tr{};
  for (std::size_t i = 0; i < dim; ++i) {
    tr += entries[i * dim + i];
    for (std::size_t j = i; j < dim; ++j) {
      const double dev = std::abs(entries[i * dim + j] - std::conj(entries[j * dim + i]));
      d.hermiticity_deviation = std::max(d.hermiticity_deviation, dev);
    }
  }
  d.trace_deviation = std::abs(tr - Complex{1.0, 0.0});

  if (std::countr_zero(dim) <= kMaxEigenQubits) {
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = entries[static_cast<std::size_t>(i * n + j)];
    const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
  }
  return d;
}

Diagnostics validate(const DensityMatrix& rho) { return validate(rho.dim(), rho.entries()); }

void write_matrix_text(const DensityMatrix& rho, std::ostream& out) {
  out << "dim " << rho.dim() << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      if (c) out << ' ';
      out << rho(r, c).real() << ',' << rho(r, c).imag();
    }
    out << '\n';
  }
}

}  // namespace qdn
