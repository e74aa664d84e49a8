// Copyright 2026 The nvdfq Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nvdfq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Phase accumulated per kHz of frequency per microsecond: 2*pi*1e-3 rad.
inline constexpr double kRadPerKhzUs = 2.0 * kPi * 1e-3;

/// Raised for malformed arguments (wrong dimensions, out-of-range values).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for geometry problems: coincident spins, empty scenes.
class GeometryError : public DomainError {
 public:
  using DomainError::DomainError;
};

namespace linalg {

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// Relative Hermiticity defect ||M - M^dagger|| / max(1, ||M||).
inline double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() / scale;
}

inline bool is_hermitian(const Matrix& m, double rel_tol = 1e-12) {
  return hermiticity_defect(m) <= rel_tol;
}

/// ||U^dagger U - 1|| (Frobenius).
inline double unitarity_defect(const Matrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - identity(u.rows())).norm();
}

inline bool is_unitary(const Matrix& u, double tol = 1e-9) { return unitarity_defect(u) <= tol; }

inline void require_hermitian(const Matrix& m, const char* what, double rel_tol = 1e-12) {
  if (!is_hermitian(m, rel_tol))
    throw DomainError(std::string(what) + ": matrix is not Hermitian");
}

/// Spectral data of a Hermitian generator; reused by propagators and their derivatives.
struct HermitianEigen {
  Eigen::VectorXd values;
  Matrix vectors;
};

inline HermitianEigen eigh(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(-i * phase * H) for Hermitian H, via eigendecomposition.
inline Matrix expm_hermitian(const HermitianEigen& eig, double phase) {
  Vector phases(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    phases(k) = std::exp(Complex(0.0, -phase * eig.values(k)));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

inline Matrix expm_hermitian(const Matrix& h, double phase) {
  return expm_hermitian(eigh(h), phase);
}

/// Orthonormal-column check for an isometry V (V^dagger V = 1).
inline bool is_isometry(const Matrix& v, double tol = 1e-9) {
  return v.cols() > 0 && v.rows() >= v.cols() &&
         (v.adjoint() * v - identity(v.cols())).norm() <= tol;
}

}  // namespace linalg
}  // namespace nvdfq
