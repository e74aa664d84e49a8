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

#include "nvdfq/geometry.hpp"
#include "nvdfq/spin_core.hpp"

#include <vector>

namespace nvdfq {

/// Effective two-level actuator over {|0>, |e>} with |e> = |+1> (default) or
/// |-1>. Index 0 is |0>, index 1 is |e>:
///   s_x = (|e><0| + |0><e|)/2,  s_y = (-i|e><0| + i|0><e|)/2,  s_z = (|e><e| - |0><0|)/2.
struct ActuatorOperators {
  Matrix x;
  Matrix y;
  Matrix z;
  Matrix excited;  // s_z + 1/2 = |e><e|

  static ActuatorOperators make() {
    Matrix x = Matrix::Zero(2, 2), y = Matrix::Zero(2, 2), z = Matrix::Zero(2, 2);
    x(1, 0) = x(0, 1) = 0.5;
    y(1, 0) = Complex(0.0, -0.5);
    y(0, 1) = Complex(0.0, 0.5);
    z(0, 0) = -0.5;
    z(1, 1) = 0.5;
    return {x, y, z, z + 0.5 * linalg::identity(2)};
  }
};

enum class ActuatorTransition { plus_one, minus_one };

/// Pair states in the |up,up>, |up,down>, |down,up>, |down,down> product basis,
/// and the DF-qubit spin operators I^L built on |up,down>, |down,up>.
struct LogicalBasis {
  Vector s0, t0, t_plus, t_minus;
  SpinMatrices pair_ops;  // I^L acting on the 4-dim pair space
  Matrix isometry;        // 4x2, columns |S0>, |T0>  (|0_L>, |1_L>)

  static const LogicalBasis& get() {
    static const LogicalBasis basis = [] {
      LogicalBasis b;
      const double r = 1.0 / std::sqrt(2.0);
      b.s0 = Vector::Zero(4);
      b.t0 = Vector::Zero(4);
      b.t_plus = Vector::Zero(4);
      b.t_minus = Vector::Zero(4);
      b.s0(1) = r;
      b.s0(2) = -r;
      b.t0(1) = r;
      b.t0(2) = r;
      b.t_plus(0) = 1.0;
      b.t_minus(3) = 1.0;
      Matrix lx = Matrix::Zero(4, 4), ly = Matrix::Zero(4, 4), lz = Matrix::Zero(4, 4);
      lx(1, 2) = lx(2, 1) = 0.5;
      ly(1, 2) = Complex(0.0, -0.5);
      ly(2, 1) = Complex(0.0, 0.5);
      lz(1, 1) = 0.5;
      lz(2, 2) = -0.5;
      b.pair_ops = {lx, ly, lz};
      b.isometry = Matrix(4, 2);
      b.isometry.col(0) = b.s0;
      b.isometry.col(1) = b.t0;
      return b;
    }();
    return basis;
  }

  /// I^L restricted to the DF qubit, in the |0_L>, |1_L> basis.
  SpinMatrices logical_ops() const {
    return {isometry.adjoint() * pair_ops.x * isometry, isometry.adjoint() * pair_ops.y * isometry,
            isometry.adjoint() * pair_ops.z * isometry};
  }
};

/// Actuator-plus-DF-qubits Hamiltonian in the electron rotating frame:
///   w1 (cos(phi) s_x + sin(phi) s_y) + sum_m [A_m I^L_x(m) + 2 B_m (s_z + 1/2) I^L_z(m)].
/// Layout: actuator (|0>, |e>) then one 2-dim DF qubit (|0_L>, |1_L>) per pair.
struct LogicalHamiltonian {
  std::vector<double> A_khz;
  std::vector<double> B_khz;
  double rabi_khz = 0.0;
  double phase = 0.0;

  std::size_t qubits() const { return A_khz.size(); }
  Eigen::Index dim() const { return Eigen::Index{2} << qubits(); }

  HilbertSpaceLayout layout() const {
    std::vector<int> dims{2};
    std::vector<std::string> names{"actuator"};
    for (std::size_t m = 0; m < qubits(); ++m) {
      dims.push_back(2);
      names.push_back("df-" + std::to_string(m + 1));
    }
    return {dims, names};
  }

  /// Logical I^L_axis of qubit m embedded in the full layout.
  Matrix logical_op(int axis, std::size_t m) const {
    return embed(LogicalBasis::get().logical_ops()[axis], m + 1, layout());
  }

  Matrix actuator_op(const Matrix& op) const { return embed(op, 0, layout()); }

  Matrix drive_x() const { return actuator_op(ActuatorOperators::make().x); }
  Matrix drive_y() const { return actuator_op(ActuatorOperators::make().y); }

  /// d H / d B, the same for every qubit; used for coupling jitter.
  Matrix coupling_derivative() const {
    const Matrix excited = actuator_op(ActuatorOperators::make().excited);
    Matrix out = Matrix::Zero(dim(), dim());
    for (std::size_t m = 0; m < qubits(); ++m) out += 2.0 * excited * logical_op(2, m);
    return out;
  }

  Matrix free_matrix() const {
    const Matrix excited = actuator_op(ActuatorOperators::make().excited);
    Matrix h = Matrix::Zero(dim(), dim());
    for (std::size_t m = 0; m < qubits(); ++m)
      h += A_khz[m] * logical_op(0, m) + 2.0 * B_khz[m] * excited * logical_op(2, m);
    return h;
  }

  Matrix matrix() const {
    return free_matrix() + rabi_khz * (std::cos(phase) * drive_x() + std::sin(phase) * drive_y());
  }
};

/// Projection onto the DF subspace: drops the -D^pq_zz/4 offset (a global phase
/// within the block) and the antisymmetric S_x I^L_y term, which vanishes for a
/// symmetric tensor.
inline LogicalHamiltonian reduce_to_logical(const std::vector<CouplingSet>& couplings,
                                            double rabi_khz = 0.0, double phase = 0.0,
                                            ActuatorTransition transition = ActuatorTransition::plus_one) {
  if (couplings.empty()) throw DomainError("reduce_to_logical needs at least one coupling set");
  LogicalHamiltonian h;
  const double sign = transition == ActuatorTransition::plus_one ? 1.0 : -1.0;
  for (const auto& c : couplings) {
    if (!std::isfinite(c.A_khz) || !std::isfinite(c.B_khz)) throw DomainError("couplings must be finite");
    h.A_khz.push_back(c.A_khz);
    h.B_khz.push_back(sign * c.B_khz);
  }
  h.rabi_khz = rabi_khz;
  h.phase = phase;
  return h;
}

inline LogicalHamiltonian reduce_to_logical(const CouplingSet& couplings, double rabi_khz = 0.0,
                                            double phase = 0.0) {
  return reduce_to_logical(std::vector<CouplingSet>{couplings}, rabi_khz, phase);
}

/// Rotation axes of the DF qubit (in the I^L frame) for each parked actuator level.
struct RotationAxes {
  Vec3 n0;
  Vec3 n_plus1;
  Vec3 n_minus1;
  double omega0_khz;
  double omega_pm1_khz;

  const Vec3& axis(int level) const { return level == 0 ? n0 : (level > 0 ? n_plus1 : n_minus1); }
  double rate(int level) const { return level == 0 ? omega0_khz : omega_pm1_khz; }
};

inline RotationAxes rotation_axes(const CouplingSet& c) {
  const double a = c.A_khz, b = c.B_khz;
  if (a == 0.0 && b == 0.0) throw DomainError("rotation axes undefined for A = B = 0");
  const double omega = std::sqrt(a * a + 4.0 * b * b);
  RotationAxes axes;
  // With A = 0 the |0> level does not rotate; n0 is kept as +x for definiteness.
  axes.n0 = Vec3(a < 0.0 ? -1.0 : 1.0, 0.0, 0.0);
  axes.omega0_khz = std::abs(a);
  axes.n_plus1 = Vec3(a / omega, 0.0, 2.0 * b / omega);
  axes.n_minus1 = Vec3(a / omega, 0.0, -2.0 * b / omega);
  axes.omega_pm1_khz = omega;
  return axes;
}

/// Isometry onto C^{actuator} (x) span{S0, T0} of pair `pair_index`, other pairs
/// unrestricted. `layout` must be an actuator_and_pairs layout.
inline Matrix df_subspace_isometry(const HilbertSpaceLayout& layout, std::size_t pair_index) {
  const std::size_t slot = 1 + 2 * pair_index;
  if (slot + 1 >= layout.slots()) throw DomainError("pair index out of range for layout");
  Eigen::Index before = 1, after = 1;
  for (std::size_t s = 0; s < slot; ++s) before *= layout.factor_dims[s];
  for (std::size_t s = slot + 2; s < layout.slots(); ++s) after *= layout.factor_dims[s];
  return linalg::kron(linalg::kron(linalg::identity(before), LogicalBasis::get().isometry),
                      linalg::identity(after));
}

/// Isometry from the logical actuator(|0>,|e>) (x) DF(|0_L>,|1_L>) space into the
/// spin-1 actuator (x) 4-dim pair space.
inline Matrix logical_embedding(ActuatorTransition transition = ActuatorTransition::plus_one) {
  Matrix act = Matrix::Zero(3, 2);
  act(1, 0) = 1.0;                                                   // |0>
  act(transition == ActuatorTransition::plus_one ? 0 : 2, 1) = 1.0;  // |+1> or |-1>
  return linalg::kron(act, LogicalBasis::get().isometry);
}

/// Worst-case population leaving span(V) over normalized inputs in span(V):
/// the largest eigenvalue of V^dagger U^dagger (1 - V V^dagger) U V.
inline double leakage(const Matrix& unitary, const Matrix& subspace_isometry) {
  if (!linalg::is_unitary(unitary, 1e-9)) throw DomainError("leakage: input is not unitary");
  if (subspace_isometry.rows() != unitary.rows() || !linalg::is_isometry(subspace_isometry))
    throw DomainError("leakage: subspace isometry does not match the unitary");
  const Matrix mapped = unitary * subspace_isometry;
  const Matrix outside = mapped - subspace_isometry * (subspace_isometry.adjoint() * mapped);
  const Matrix gram = outside.adjoint() * outside;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, solver.eigenvalues().maxCoeff());
}

/// Leakage for a unitary on a single 4-dim pair space.
inline double leakage(const Matrix& unitary, const LogicalBasis& basis) {
  return leakage(unitary, basis.isometry);
}

}  // namespace nvdfq
