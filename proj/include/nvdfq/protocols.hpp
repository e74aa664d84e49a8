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

#include "nvdfq/dynamics.hpp"
#include "nvdfq/geometry.hpp"
#include "nvdfq/logical.hpp"
#include "nvdfq/spin_core.hpp"

#include <Eigen/Geometry>

#include <optional>
#include <string>
#include <vector>

namespace nvdfq {

// ---------------------------------------------------------------- RF pulses

struct RFPulse {
  double frequency_khz = 0.0;
  /// Effective on-resonance Rabi rate of the T(+-1) <-> T0 transition.
  double rabi_khz = 5.0;
  double duration_us = 100.0;

  void validate() const {
    if (!(frequency_khz > 0.0) || !std::isfinite(frequency_khz))
      throw DomainError("RF frequency must be positive");
    if (!(rabi_khz > 0.0) || !std::isfinite(rabi_khz)) throw DomainError("RF Rabi rate must be positive");
    if (!(duration_us > 0.0) || !std::isfinite(duration_us)) throw DomainError("RF duration must be positive");
  }

  /// pi pulse: t = 1 / (2 w_RF).
  static RFPulse pi_pulse(double frequency_khz, double rabi_khz = 5.0) {
    return {frequency_khz, rabi_khz, 1000.0 / (2.0 * rabi_khz)};
  }
};

struct TripletLevels {
  double e_plus = 0.0;   // E(T+1), kHz
  double e_zero = 0.0;   // E(T0)
  double e_minus = 0.0;  // E(T-1)
  Vector t_plus, t_zero, t_minus;  // dressed eigenvectors in the product basis
};

/// Triplet energies of a 4-dim pair Hamiltonian. The singlet decouples for any
/// exchange-symmetric Hamiltonian, so the triplet block is diagonalized alone
/// and each eigenvector is labelled by its largest bare-triplet overlap.
inline TripletLevels triplet_levels(const Matrix& pair_h) {
  if (pair_h.rows() != 4 || pair_h.cols() != 4) throw DomainError("pair Hamiltonian must be 4x4");
  linalg::require_hermitian(pair_h, "pair Hamiltonian");
  const auto& basis = LogicalBasis::get();
  Matrix t(4, 3);
  t.col(0) = basis.t_plus;
  t.col(1) = basis.t0;
  t.col(2) = basis.t_minus;
  const auto eig = linalg::eigh(t.adjoint() * pair_h * t);
  std::array<int, 3> label{-1, -1, -1};
  for (int k = 0; k < 3; ++k) {
    Eigen::Index best = 0;
    eig.vectors.col(k).cwiseAbs().maxCoeff(&best);
    label[static_cast<std::size_t>(best)] = k;
  }
  for (int l : label)
    if (l < 0) throw DomainError("triplet levels are mixed beyond recognition");
  const double gap = std::min(eig.values(1) - eig.values(0), eig.values(2) - eig.values(1));
  if (gap < 1e-9 * std::max(1.0, eig.values.cwiseAbs().maxCoeff()))
    throw DomainError("degenerate triplet spectrum; RF transitions are not resolved");
  TripletLevels out;
  out.e_plus = eig.values(label[0]);
  out.e_zero = eig.values(label[1]);
  out.e_minus = eig.values(label[2]);
  out.t_plus = t * eig.vectors.col(label[0]);
  out.t_zero = t * eig.vectors.col(label[1]);
  out.t_minus = t * eig.vectors.col(label[2]);
  return out;
}

struct RFTransitions {
  double delta1_khz;  // E(T+1) - E(T0)
  double delta2_khz;  // E(T0) - E(T-1)
};

inline RFTransitions rf_transition_frequencies(const Matrix& pair_h) {
  const auto levels = triplet_levels(pair_h);
  return {levels.e_plus - levels.e_zero, levels.e_zero - levels.e_minus};
}

/// Lab-frame pair Hamiltonian with the actuator in |0>: nuclear Zeeman plus
/// the full intra-pair dipolar tensor.
inline Matrix pair_hamiltonian(const SpinPair& pair, const PhysicalConstants& c = {}) {
  return pair_hamiltonian(proton_proton_tensor(pair, c), c.nuclear_zeeman_khz());
}

/// I^p_x + I^q_x on the 4-dim pair space.
inline Matrix pair_rf_operator() {
  const SpinMatrices i = spin_operators(0.5);
  const Matrix id = linalg::identity(2);
  return linalg::kron(i.x, id) + linalg::kron(id, i.x);
}

/// Non-RWA propagator of H + sqrt(2) w_RF cos(2 pi nu t) X over the pulse
/// length, midpoint exponential steps of at most 1/(steps_per_period nu).
inline Matrix rf_propagator(const Matrix& h_static, const Matrix& rf_operator, const RFPulse& pulse,
                            int steps_per_period = 64) {
  pulse.validate();
  if (steps_per_period < 16) throw DomainError("RF integration needs at least 16 steps per period");
  if (h_static.rows() != rf_operator.rows()) throw DomainError("RF operator dimension mismatch");
  const double period_us = 1000.0 / pulse.frequency_khz;
  const auto steps = static_cast<long>(std::ceil(pulse.duration_us / (period_us / steps_per_period)));
  const double dt = pulse.duration_us / static_cast<double>(steps);
  const double amplitude = std::sqrt(2.0) * pulse.rabi_khz;
  Matrix u = linalg::identity(h_static.rows());
  for (long k = 0; k < steps; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    const Matrix h = h_static + amplitude * std::cos(kRadPerKhzUs * pulse.frequency_khz * t) * rf_operator;
    u = linalg::expm_hermitian(h, kRadPerKhzUs * dt) * u;
  }
  return u;
}

/// Advisory messages about a pulse; empty when the pulse is within the
/// selective regime w_RF <= |Delta1 - Delta2| / 5.
inline std::vector<std::string> rf_warnings(const Matrix& pair_h, const RFPulse& pulse) {
  std::vector<std::string> out;
  const auto tr = rf_transition_frequencies(pair_h);
  const double split = std::abs(tr.delta1_khz - tr.delta2_khz);
  if (pulse.rabi_khz > split / 5.0)
    out.push_back("RF Rabi rate " + std::to_string(pulse.rabi_khz) + " kHz exceeds one fifth of |3A| = " +
                  std::to_string(split) + " kHz; selectivity degrades");
  return out;
}

/// Applies an RF pulse to a pair state (4x4 density matrix). The pulse must sit
/// within a few Rabi widths of one of the two transitions.
inline Matrix simulate_rf_pi(const Matrix& pair_rho, const Matrix& pair_h, const RFPulse& pulse,
                             int steps_per_period = 64) {
  pulse.validate();
  if (pair_rho.rows() != 4 || pair_rho.cols() != 4) throw DomainError("pair state must be 4x4");
  const auto tr = rf_transition_frequencies(pair_h);
  const double detuning =
      std::min(std::abs(pulse.frequency_khz - tr.delta1_khz), std::abs(pulse.frequency_khz - tr.delta2_khz));
  if (detuning > 4.0 * pulse.rabi_khz)
    throw DomainError("RF pulse is off resonance with both triplet transitions (detuning " +
                      std::to_string(detuning) + " kHz)");
  const Matrix u = rf_propagator(pair_h, pair_rf_operator(), pulse, steps_per_period);
  return u * pair_rho * u.adjoint();
}

inline double population(const Matrix& rho, const Vector& psi) {
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

// ------------------------------------------------ actuator + one pair model

/// Two-level actuator (|0>, |e>) in its rotating frame coupled to one lab-frame
/// nuclear pair: 1 (x) H_pair + |e><e| (x) sum_j (D^p_zj I^p_j + D^q_zj I^q_j).
/// Only the S_z part of the actuator coupling is kept (large zero-field
/// splitting); the I_x, I_y pieces remain and allow small DF leakage.
struct ActuatorPairModel {
  Matrix h_pair;  // 4x4, actuator in |0>
  Matrix h_free;  // 8x8
  Matrix drive_x, drive_y;
  CouplingSet couplings;

  static HilbertSpaceLayout layout() { return HilbertSpaceLayout({2, 2, 2}, {"actuator", "p", "q"}); }

  static ActuatorPairModel from_scene(const SceneGeometry& scene, std::size_t pair_index = 0,
                                      const PhysicalConstants& c = {},
                                      ActuatorTransition transition = ActuatorTransition::plus_one) {
    scene.validate();
    if (pair_index >= scene.pairs.size()) throw GeometryError("pair index out of range");
    const SpinPair& pair = scene.pairs[pair_index];
    ActuatorPairModel m;
    m.h_pair = pair_hamiltonian(pair, c);
    const double level = transition == ActuatorTransition::plus_one ? 1.0 : -1.0;
    const SpinMatrices i = spin_operators(0.5);
    const Matrix id = linalg::identity(2);
    const Mat3 dp = actuator_nucleus_tensor(scene.actuator, pair.p(), c);
    const Mat3 dq = actuator_nucleus_tensor(scene.actuator, pair.q(), c);
    Matrix coupling = Matrix::Zero(4, 4);
    for (int j = 0; j < 3; ++j)
      coupling += dp(2, j) * linalg::kron(i[j], id) + dq(2, j) * linalg::kron(id, i[j]);
    const ActuatorOperators s = ActuatorOperators::make();
    m.h_free = linalg::kron(linalg::identity(2), m.h_pair) + level * linalg::kron(s.excited, coupling);
    m.drive_x = linalg::kron(s.x, linalg::identity(4));
    m.drive_y = linalg::kron(s.y, linalg::identity(4));
    m.couplings = pair_couplings(scene, pair_index, c);
    if (transition == ActuatorTransition::minus_one) m.couplings.B_khz = -m.couplings.B_khz;
    return m;
  }

  ControlSystem control_system() const {
    return {h_free, drive_x, drive_y, Matrix::Zero(h_free.rows(), h_free.cols())};
  }

  /// Embeds a 4x4 actuator (x) DF-qubit operator into the 8-dim space (acts as
  /// identity outside the DF subspace).
  static Matrix embed_logical(const Matrix& logical4) {
    const Matrix v = linalg::kron(linalg::identity(2), LogicalBasis::get().isometry);
    return linalg::identity(8) - v * v.adjoint() + v * logical4 * v.adjoint();
  }
};

// ---------------------------------------------------------- initialization

enum class StepKind { laser_reset, mw_half_pi, swap, mw_half_pi_inverse, rf };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::laser_reset: return "laser";
    case StepKind::mw_half_pi: return "mw_pi/2_y";
    case StepKind::swap: return "swap";
    case StepKind::mw_half_pi_inverse: return "mw_-pi/2_y";
    case StepKind::rf: return "rf";
  }
  return "unknown";
}

struct ProtocolStep {
  StepKind kind = StepKind::laser_reset;
  std::optional<RFPulse> rf;  // for StepKind::rf
};

struct ProtocolBlock {
  std::string name;
  std::vector<ProtocolStep> steps;
};

struct InitializationPlan {
  std::vector<ProtocolBlock> blocks;
  /// Hard MW pulse strength for the pi/2 rotations.
  double mw_rabi_khz = 1000.0;

  void validate() const {
    if (blocks.empty()) throw DomainError("initialization plan is empty");
    if (!(mw_rabi_khz > 0.0)) throw DomainError("MW Rabi rate must be positive");
    const auto& last = blocks.back().steps;
    if (last.empty() || last.back().kind != StepKind::laser_reset)
      throw DomainError("initialization plan must end with a laser reset");
    for (const auto& b : blocks)
      for (const auto& s : b.steps)
        if (s.kind == StepKind::rf) {
          if (!s.rf) throw DomainError("RF step without a pulse");
          s.rf->validate();
        }
  }

  /// Three blocks: DF populations first, then T+1 via RF1, then T-1 via RF2.
  /// Every block re-polarizes the actuator before and after its SWAP.
  static InitializationPlan standard(const Matrix& pair_h, double rf_rabi_khz = 5.0) {
    const auto tr = rf_transition_frequencies(pair_h);
    auto swap_block = [](std::string name, std::optional<RFPulse> rf) {
      ProtocolBlock b{std::move(name), {}};
      if (rf) b.steps.push_back({StepKind::rf, rf});
      for (StepKind k : {StepKind::laser_reset, StepKind::mw_half_pi, StepKind::swap, StepKind::laser_reset})
        b.steps.push_back({k, std::nullopt});
      return b;
    };
    InitializationPlan plan;
    plan.blocks.push_back(swap_block("df", std::nullopt));
    plan.blocks.push_back(swap_block("rf1", RFPulse::pi_pulse(tr.delta1_khz, rf_rabi_khz)));
    plan.blocks.push_back(swap_block("rf2", RFPulse::pi_pulse(tr.delta2_khz, rf_rabi_khz)));
    return plan;
  }
};

struct BlockReport {
  std::string name;
  double singlet_population = 0.0;
};

struct ProtocolReport {
  Matrix pair_rho;  // 4x4
  double fidelity = 0.0;  // <S0|rho|S0>
  std::vector<BlockReport> blocks;
  std::vector<std::string> warnings;
};

namespace detail {

inline Matrix half_pi_y(const ActuatorPairModel& model, double rabi_khz, double sign) {
  const ControlSegment seg{250.0 / rabi_khz, kPi / 2, sign * rabi_khz};
  return propagate_segment(model.control_system(), seg);
}

inline Matrix apply_step(const ActuatorPairModel& model, const Matrix& rho, const ProtocolStep& step,
                         const Matrix& swap_u, double mw_rabi_khz) {
  switch (step.kind) {
    case StepKind::laser_reset:
      return actuator_reset(QuantumState{rho, ActuatorPairModel::layout()}).rho;
    case StepKind::mw_half_pi:
    case StepKind::mw_half_pi_inverse: {
      const Matrix u = half_pi_y(model, mw_rabi_khz, step.kind == StepKind::mw_half_pi ? 1.0 : -1.0);
      return u * rho * u.adjoint();
    }
    case StepKind::swap:
      return swap_u * rho * swap_u.adjoint();
    case StepKind::rf: {
      const Matrix rf_op = linalg::kron(linalg::identity(2), pair_rf_operator());
      const Matrix u = rf_propagator(model.h_free, rf_op, *step.rf);
      return u * rho * u.adjoint();
    }
  }
  return rho;
}

inline Matrix pair_part(const Matrix& rho8) { return partial_trace_first(rho8, 2); }

}  // namespace detail

/// Runs the plan on an actuator(|0>) (x) pair state and reports the singlet
/// population after every block. `swap` is the pulse sequence realizing the
/// actuator <-> DF SWAP for this model's couplings.
inline ProtocolReport run_initialization(const Matrix& initial_pair_rho, const InitializationPlan& plan,
                                         const ActuatorPairModel& model, const PulseSequence& swap) {
  plan.validate();
  if (initial_pair_rho.rows() != 4 || initial_pair_rho.cols() != 4)
    throw DomainError("initial pair state must be 4x4");
  if (swap.segments.empty()) throw DomainError("initialization needs a SWAP sequence");
  const Matrix swap_u = sequence_unitary(model.control_system(), swap);
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  Matrix rho = linalg::kron(ground, initial_pair_rho);
  ProtocolReport report;
  const Vector& s0 = LogicalBasis::get().s0;
  for (const auto& block : plan.blocks) {
    for (const auto& step : block.steps) {
      if (step.kind == StepKind::rf)
        for (auto& w : rf_warnings(model.h_pair, *step.rf)) report.warnings.push_back(std::move(w));
      rho = detail::apply_step(model, rho, step, swap_u, plan.mw_rabi_khz);
    }
    report.blocks.push_back({block.name, population(detail::pair_part(rho), s0)});
  }
  report.pair_rho = detail::pair_part(rho);
  report.fidelity = population(report.pair_rho, s0);
  return report;
}

struct ReadoutDistribution {
  double p0 = 0.0;  // actuator |0>, reports |0_L> = S0
  double p1 = 0.0;  // actuator |e>, reports |1_L> = T0
};

/// Maps the DF qubit onto the actuator: laser reset, SWAP, inverse pi/2 about y,
/// then the Born rule on the actuator factor.
inline ReadoutDistribution run_readout(const Matrix& pair_rho, const ActuatorPairModel& model,
                                       const PulseSequence& swap, double mw_rabi_khz = 1000.0) {
  if (pair_rho.rows() != 4 || pair_rho.cols() != 4) throw DomainError("pair state must be 4x4");
  const Matrix swap_u = sequence_unitary(model.control_system(), swap);
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  Matrix rho = linalg::kron(ground, pair_rho);
  rho = swap_u * rho * swap_u.adjoint();
  const Matrix u = detail::half_pi_y(model, mw_rabi_khz, -1.0);
  rho = u * rho * u.adjoint();
  const Matrix act = partial_trace_rest(rho, 2);
  return {act(0, 0).real(), act(1, 1).real()};
}

// ------------------------------------------------- single-qubit dwell steps

struct DwellStep {
  int actuator_level = 0;  // 0, +1 or -1
  double dwell_us = 0.0;
};

namespace detail {

/// SO(3) image of a 2x2 unitary in the I^L frame: R_ij = 2 Tr(L_i U L_j U^dagger).
inline Mat3 logical_rotation(const Matrix& u) {
  const SpinMatrices l = LogicalBasis::get().logical_ops();
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = 2.0 * (l[i] * u * l[j] * u.adjoint()).trace().real();
  return r;
}

inline Mat3 rot(const Vec3& axis, double angle) { return Eigen::AngleAxisd(angle, axis).toRotationMatrix(); }

/// Signed angle taking the component of `from` perpendicular to `axis` onto
/// that of `to`.
inline double angle_about(const Vec3& axis, const Vec3& from, const Vec3& to) {
  const Vec3 f = from - axis.dot(from) * axis;
  const Vec3 t = to - axis.dot(to) * axis;
  if (f.norm() < 1e-12 || t.norm() < 1e-12) return 0.0;
  return std::atan2(axis.dot(f.cross(t)), f.dot(t));
}

inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

struct AxisFactor {
  int which;  // 0 = first axis, 1 = second
  double angle;
};

/// Writes `r` as a product of rotations alternating about unit axes a and b,
/// leftmost factor applied last. Returns nullopt if more than `max_factors` are needed.
inline std::optional<std::vector<AxisFactor>> alternating_factors(const Mat3& r, const Vec3& a, const Vec3& b,
                                                                  int max_factors) {
  const double theta = angle_between(a, b);
  if (theta < 1e-9 || theta > kPi / 2 + 1e-12) return std::nullopt;
  const Vec3 ra = r * a;
  for (int prefixes = 0; prefixes <= max_factors; ++prefixes) {
    // Prefix chain P_1 ... P_k alternating, ending with a rotation about b.
    std::vector<AxisFactor> prefix;
    Vec3 v = ra;
    Mat3 left = Mat3::Identity();
    for (int k = 0; k < prefixes; ++k) {
      const bool about_b = (prefixes - k) % 2 == 1;
      const Vec3& axis = about_b ? b : a;
      const Vec3& goal = about_b ? a : b;
      const double x = -angle_about(axis, v, goal);  // P^{-1} = R_axis(x) moves v toward goal
      v = rot(axis, x) * v;
      prefix.push_back({about_b ? 1 : 0, -x});
      left = left * rot(axis, -x);
    }
    const double psi = angle_between(a, v);
    if (psi > 2.0 * theta + 1e-12) continue;
    const Mat3 residual = left.transpose() * r;
    const double s2 = std::sin(theta) * std::sin(theta);
    const double cb = std::clamp((std::cos(psi) - std::cos(theta) * std::cos(theta)) / s2, -1.0, 1.0);
    const double beta = std::acos(cb);
    const Vec3 w = rot(b, beta) * a;
    const double alpha = angle_about(a, w, residual * a);
    const Mat3 rest = rot(b, -beta) * rot(a, -alpha) * residual;  // rotation about a
    const Vec3 e = a.unitOrthogonal();
    const double gamma = angle_about(a, e, rest * e);
    std::vector<AxisFactor> out = prefix;
    out.push_back({0, alpha});
    out.push_back({1, beta});
    out.push_back({0, gamma});
    // Drop trivial factors, merge neighbours about the same axis.
    std::vector<AxisFactor> merged;
    for (const auto& f : out) {
      const double ang = std::remainder(f.angle, 2.0 * kPi);
      if (std::abs(ang) < 1e-12) continue;
      if (!merged.empty() && merged.back().which == f.which)
        merged.back().angle += ang;
      else
        merged.push_back({f.which, ang});
    }
    std::erase_if(merged, [](const AxisFactor& f) { return std::abs(std::remainder(f.angle, 2.0 * kPi)) < 1e-12; });
    if (static_cast<int>(merged.size()) <= max_factors) return merged;
  }
  return std::nullopt;
}

}  // namespace detail

/// Composed DF-qubit unitary of a dwell list in the |0_L>, |1_L> basis.
inline Matrix dwell_unitary(const std::vector<DwellStep>& steps, const CouplingSet& couplings) {
  const SpinMatrices l = LogicalBasis::get().logical_ops();
  Matrix u = linalg::identity(2);
  for (const auto& s : steps) {
    if (s.actuator_level < -1 || s.actuator_level > 1) throw DomainError("actuator level must be -1, 0 or +1");
    if (!(s.dwell_us >= 0.0)) throw DomainError("dwell time must be non-negative");
    const double b = 2.0 * couplings.B_khz * s.actuator_level;
    u = linalg::expm_hermitian(Matrix(couplings.A_khz * l.x + b * l.z), kRadPerKhzUs * s.dwell_us) * u;
  }
  return u;
}

/// Dwell-step synthesis of a DF-qubit unitary (|0_L>, |1_L> basis, global phase
/// ignored). Tries every pair of the three rotation axes and keeps the
/// shortest list, then the shortest total time.
inline std::vector<DwellStep> synthesize_single_qubit(const Matrix& target, const RotationAxes& axes,
                                                      int max_steps = 5) {
  if (target.rows() != 2 || target.cols() != 2 || !linalg::is_unitary(target, 1e-9))
    throw DomainError("single-qubit target must be a 2x2 unitary");
  if (axes.omega0_khz == 0.0 || std::abs(axes.n_plus1.z()) < 1e-12)
    throw DomainError("rotation axes are collinear (B = 0); single-qubit control is not universal");
  const Mat3 r = detail::logical_rotation(target);
  if ((r - Mat3::Identity()).norm() < 1e-12) return {};

  const std::array<int, 3> levels{0, 1, -1};
  std::optional<std::vector<DwellStep>> best;
  double best_time = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const Vec3 a = axes.axis(levels[i]);
      Vec3 b = axes.axis(levels[j]);
      // Work with the acute representative of b; a rotation about -b is one about b with the opposite angle.
      const double flip = a.dot(b) < 0.0 ? -1.0 : 1.0;
      b *= flip;
      const auto factors = detail::alternating_factors(r, a, b, max_steps);
      if (!factors) continue;
      std::vector<DwellStep> steps;
      // Factors are listed leftmost first; time order is the reverse.
      for (auto it = factors->rbegin(); it != factors->rend(); ++it) {
        const int level = it->which == 0 ? levels[i] : levels[j];
        double angle = it->which == 0 ? it->angle : flip * it->angle;
        angle = std::fmod(angle, 2.0 * kPi);
        if (angle < 0.0) angle += 2.0 * kPi;
        steps.push_back({level, angle / (kRadPerKhzUs * axes.rate(level))});
      }
      double time = 0.0;
      for (const auto& s : steps) time += s.dwell_us;
      if (!best || steps.size() < best->size() || (steps.size() == best->size() && time < best_time - 1e-9)) {
        best = std::move(steps);
        best_time = time;
      }
    }
  if (!best)
    throw DomainError("target needs more than " + std::to_string(max_steps) +
                      " dwell steps for these couplings");
  return *best;
}

}  // namespace nvdfq
