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

#include "nvdfq/linalg.hpp"
#include "nvdfq/logical.hpp"
#include "nvdfq/parallel.hpp"
#include "nvdfq/spin_core.hpp"

#include <optional>
#include <vector>

namespace nvdfq {

/// One piecewise-constant drive interval on the actuator.
struct ControlSegment {
  double duration_us = 0.0;
  double phase = 0.0;         // 0 drives s_x, pi/2 drives s_y
  double amplitude_khz = 0.0;  // signed Rabi frequency w1

  void validate() const {
    if (!(duration_us > 0.0)) throw DomainError("control segment duration must be positive");
    if (!std::isfinite(phase) || !std::isfinite(amplitude_khz))
      throw DomainError("control segment has non-finite parameters");
  }
};

struct PulseSequence {
  std::vector<ControlSegment> segments;
  Frame frame = Frame::electron_rotating;

  double total_duration_us() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration_us;
    return t;
  }
};

/// Quasi-static noise: a fractional drive error and an offset on every B.
struct NoiseModel {
  double delta1 = 0.0;
  double coupling_jitter_khz = 0.0;

  void validate() const {
    if (!(std::abs(delta1) <= 0.2)) throw DomainError("delta1 outside the supported range |delta1| <= 0.2");
    if (!std::isfinite(coupling_jitter_khz)) throw DomainError("coupling jitter must be finite");
  }
};

/// Free Hamiltonian plus the two drive quadratures of a controllable system.
/// `coupling_derivative` is dH/dB, scaled by the jitter of a NoiseModel.
struct ControlSystem {
  Matrix h_free;
  Matrix drive_x;
  Matrix drive_y;
  Matrix coupling_derivative;

  static ControlSystem from_logical(const LogicalHamiltonian& h) {
    return {h.free_matrix(), h.drive_x(), h.drive_y(), h.coupling_derivative()};
  }

  Eigen::Index dim() const { return h_free.rows(); }

  void validate() const {
    const auto n = h_free.rows();
    for (const Matrix* m : {&h_free, &drive_x, &drive_y, &coupling_derivative}) {
      if (m->rows() != n || m->cols() != n) throw DomainError("control system: dimension mismatch");
      linalg::require_hermitian(*m, "control system");
    }
  }

  Matrix drive(double phase) const { return std::cos(phase) * drive_x + std::sin(phase) * drive_y; }

  /// Generator of one segment, kHz.
  Matrix generator(const ControlSegment& segment, const NoiseModel& noise) const {
    return h_free + noise.coupling_jitter_khz * coupling_derivative +
           (1.0 + noise.delta1) * segment.amplitude_khz * drive(segment.phase);
  }
};

/// U = exp(-i 2 pi (H_free(jittered) + (1 + delta1) w1 (cos(phi) s_x + sin(phi) s_y)) t).
inline Matrix propagate_segment(const ControlSystem& system, const ControlSegment& segment,
                                const NoiseModel& noise = {}) {
  segment.validate();
  noise.validate();
  return linalg::expm_hermitian(system.generator(segment, noise), kRadPerKhzUs * segment.duration_us);
}

/// Single-qubit-logical convenience: drive operators are those of the actuator
/// slot of a LogicalHamiltonian layout with the same dimension as h_free.
inline Matrix propagate_segment(const Matrix& h_free, const ControlSegment& segment,
                                const NoiseModel& noise = {}) {
  linalg::require_hermitian(h_free, "propagate_segment");
  if (h_free.rows() < 2 || (h_free.rows() & (h_free.rows() - 1)) != 0)
    throw DomainError("propagate_segment: expected an actuator (x) DF-qubit space");
  LogicalHamiltonian shape;
  for (Eigen::Index n = h_free.rows(); n > 2; n /= 2) {
    shape.A_khz.push_back(0.0);
    shape.B_khz.push_back(0.0);
  }
  ControlSystem system = ControlSystem::from_logical(shape);
  system.h_free = h_free;
  if (noise.coupling_jitter_khz != 0.0)
    throw DomainError("propagate_segment: coupling jitter needs a ControlSystem");
  return propagate_segment(system, segment, noise);
}

/// Ordered product; later segments multiply on the left. Empty -> identity.
inline Matrix sequence_unitary(const ControlSystem& system, const PulseSequence& sequence,
                               const NoiseModel& noise = {}) {
  Matrix u = linalg::identity(system.dim());
  for (const auto& segment : sequence.segments) u = propagate_segment(system, segment, noise) * u;
  return u;
}

/// Density matrix over a declared layout.
struct QuantumState {
  Matrix rho;
  HilbertSpaceLayout layout;

  void validate(double tol = 1e-10) const {
    if (rho.rows() != layout.total_dim() || rho.cols() != layout.total_dim())
      throw DomainError("state does not match its layout");
    if (!linalg::is_hermitian(rho, tol)) throw DomainError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0)) > tol) throw DomainError("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -tol) throw DomainError("density matrix is not positive");
  }

  double trace() const { return rho.trace().real(); }

  static QuantumState maximally_mixed(const HilbertSpaceLayout& layout) {
    const auto n = layout.total_dim();
    return {linalg::identity(n) / static_cast<double>(n), layout};
  }

  static QuantumState pure(const Vector& psi, const HilbertSpaceLayout& layout) {
    const Vector v = psi / psi.norm();
    return {v * v.adjoint(), layout};
  }

  QuantumState evolved(const Matrix& u) const { return {u * rho * u.adjoint(), layout}; }
};

/// Traces out slot 0 (dimension `first_dim`) of a bipartite operator.
inline Matrix partial_trace_first(const Matrix& rho, Eigen::Index first_dim) {
  const Eigen::Index rest = rho.rows() / first_dim;
  Matrix out = Matrix::Zero(rest, rest);
  for (Eigen::Index a = 0; a < first_dim; ++a) out += rho.block(a * rest, a * rest, rest, rest);
  return out;
}

/// Traces out every slot except 0.
inline Matrix partial_trace_rest(const Matrix& rho, Eigen::Index first_dim) {
  const Eigen::Index rest = rho.rows() / first_dim;
  Matrix out(first_dim, first_dim);
  for (Eigen::Index a = 0; a < first_dim; ++a)
    for (Eigen::Index b = 0; b < first_dim; ++b) out(a, b) = rho.block(a * rest, b * rest, rest, rest).trace();
  return out;
}

/// Index of the NV |0> level in an actuator slot of dimension 2 (|0>, |e>)
/// or 3 (|+1>, |0>, |-1>).
inline Eigen::Index actuator_ground_index(int actuator_dim) {
  if (actuator_dim == 2) return 0;
  if (actuator_dim == 3) return 1;
  throw DomainError("actuator dimension must be 2 or 3");
}

/// Ideal optical reset: actuator -> |0><0|, nuclear factors untouched.
inline QuantumState actuator_reset(const QuantumState& state) {
  const int dim = state.layout.factor_dims.at(0);
  Matrix ground = Matrix::Zero(dim, dim);
  const auto g = actuator_ground_index(dim);
  ground(g, g) = 1.0;
  return {linalg::kron(ground, partial_trace_first(state.rho, dim)), state.layout};
}

/// |Tr(target^dagger V^dagger U V)| / d, with V the computational-subspace
/// isometry (identity when absent) and d = dim(target).
inline double gate_fidelity(const Matrix& u, const Matrix& target,
                            const std::optional<Matrix>& subspace_isometry = std::nullopt) {
  if (target.rows() != target.cols() || target.rows() == 0)
    throw DomainError("gate_fidelity: target must be square and nonempty");
  Matrix block;
  if (subspace_isometry) {
    if (subspace_isometry->cols() == 0) throw DomainError("gate_fidelity: zero-dimensional projector");
    if (subspace_isometry->rows() != u.rows() || subspace_isometry->cols() != target.rows())
      throw DomainError("gate_fidelity: projector dimensions do not match");
    block = subspace_isometry->adjoint() * u * *subspace_isometry;
  } else {
    if (u.rows() != target.rows() || u.cols() != target.cols())
      throw DomainError("gate_fidelity: dimension mismatch");
    block = u;
  }
  return std::abs((target.adjoint() * block).trace()) / static_cast<double>(target.rows());
}

struct NoiseSweepPoint {
  double delta1;
  double jitter_khz;
  double fidelity;
};

/// The robustness grid: +-5 % in 0.5 % steps.
inline std::vector<double> default_delta1_grid() {
  std::vector<double> grid;
  for (int k = -10; k <= 10; ++k) grid.push_back(0.005 * k);
  return grid;
}

/// Fidelity at every (delta1, jitter) grid point, delta1-major order.
inline std::vector<NoiseSweepPoint> noise_sweep(const ControlSystem& system, const PulseSequence& sequence,
                                                const Matrix& target,
                                                const std::optional<Matrix>& subspace_isometry,
                                                const std::vector<double>& delta1_grid,
                                                const std::vector<double>& jitter_grid,
                                                unsigned threads = 1) {
  if (delta1_grid.empty() || jitter_grid.empty()) throw DomainError("noise sweep: empty grid");
  std::vector<NoiseSweepPoint> table(delta1_grid.size() * jitter_grid.size());
  detail::parallel_for(table.size(), threads, [&](std::size_t k) {
    const NoiseModel noise{delta1_grid[k / jitter_grid.size()], jitter_grid[k % jitter_grid.size()]};
    const Matrix u = sequence_unitary(system, sequence, noise);
    table[k] = {noise.delta1, noise.coupling_jitter_khz, gate_fidelity(u, target, subspace_isometry)};
  });
  return table;
}

}  // namespace nvdfq
