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
#include "nvdfq/logical.hpp"
#include "nvdfq/parallel.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace nvdfq {

/// SWAP between the actuator and one DF qubit, 1/2 (1 + 4 s . I^L), on the
/// actuator(|0>, |e>) (x) DF(|0_L>, |1_L>) space. It exchanges the two spin
/// frames, mapping actuator |0> (s_z = -1/2) onto |down,up> and |e> onto |up,down>.
inline Matrix swap_target() {
  const LogicalHamiltonian shape{{0.0}, {0.0}};
  const ActuatorOperators s = ActuatorOperators::make();
  Matrix out = linalg::identity(4);
  for (int axis = 0; axis < 3; ++axis) {
    const Matrix& sa = axis == 0 ? s.x : (axis == 1 ? s.y : s.z);
    out += 4.0 * shape.actuator_op(sa) * shape.logical_op(axis, 0);
  }
  return 0.5 * out;
}

/// CNOT on DF1 (x) DF2 in the |0_L>, |1_L> basis, DF qubit 1 as control.
inline Matrix cnot_target() {
  Matrix out = Matrix::Zero(4, 4);
  out(0, 0) = out(1, 1) = 1.0;
  out(2, 3) = out(3, 2) = 1.0;
  return out;
}

struct EnsembleMember {
  double delta1 = 0.0;
  double jitter_khz = 0.0;
  double weight = 1.0;
};

/// Three-point drive-error ensemble {-spread, 0, +spread}.
inline std::vector<EnsembleMember> delta1_ensemble(double spread = 0.02) {
  return {{-spread, 0.0, 1.0}, {0.0, 0.0, 1.0}, {spread, 0.0, 1.0}};
}

/// Piecewise-constant control problem: segment k drives along x (k even) or
/// y (k odd) with a free signed amplitude.
struct GrapeProblem {
  ControlSystem system;
  std::vector<double> durations_us;
  Matrix target;
  std::optional<Matrix> subspace_isometry;
  double amplitude_bound_khz = 20000.0;
  std::vector<EnsembleMember> ensemble;
  /// Weight of the return-deficit penalty 1 - ||V^dagger U V||_F^2 / d.
  double return_penalty = 0.0;

  std::size_t segment_count() const { return durations_us.size(); }
  static double phase_of(std::size_t k) { return k % 2 == 0 ? 0.0 : kPi / 2; }

  void validate() const {
    system.validate();
    if (durations_us.empty()) throw DomainError("GRAPE problem needs at least one segment");
    for (double t : durations_us)
      if (!(t >= 0.0)) throw DomainError("GRAPE segment durations must be non-negative");
    if (!(amplitude_bound_khz > 0.0)) throw DomainError("amplitude bound must be positive");
    if (!linalg::is_unitary(target, 1e-9)) throw DomainError("GRAPE target is not unitary");
    if (subspace_isometry) {
      if (subspace_isometry->rows() != system.dim() || subspace_isometry->cols() != target.rows() ||
          !linalg::is_isometry(*subspace_isometry))
        throw DomainError("GRAPE subspace projector does not match the target");
    } else if (target.rows() != system.dim()) {
      throw DomainError("GRAPE target dimension does not match the system");
    }
    for (const auto& m : ensemble) NoiseModel{m.delta1, m.jitter_khz}.validate();
  }

  /// Zero-duration slots act as identity and are left out of the sequence.
  PulseSequence sequence(const std::vector<double>& amplitudes) const {
    PulseSequence seq;
    for (std::size_t k = 0; k < amplitudes.size(); ++k)
      if (durations_us[k] > 0.0) seq.segments.push_back({durations_us[k], phase_of(k), amplitudes[k]});
    return seq;
  }

  std::vector<EnsembleMember> members() const {
    std::vector<EnsembleMember> out = ensemble.empty() ? std::vector<EnsembleMember>{{}} : ensemble;
    double total = 0.0;
    for (const auto& m : out) total += m.weight;
    for (auto& m : out) m.weight /= total;
    return out;
  }
};

inline GrapeProblem make_problem(ControlSystem system, std::size_t segments, double segment_us,
                                 Matrix target, std::optional<Matrix> isometry = std::nullopt) {
  GrapeProblem p;
  p.system = std::move(system);
  p.durations_us.assign(segments, segment_us);
  p.target = std::move(target);
  p.subspace_isometry = std::move(isometry);
  return p;
}

/// Actuator <-> DF SWAP, 100 x 1.5 us by default.
inline GrapeProblem swap_problem(const CouplingSet& couplings, std::size_t segments = 100,
                                 double segment_us = 1.5) {
  return make_problem(ControlSystem::from_logical(reduce_to_logical(couplings)), segments, segment_us,
                      swap_target());
}

/// DF1 -> DF2 CNOT through an actuator that starts and ends in |0>, 100 x 5 us by default.
inline GrapeProblem cnot_problem(const CouplingSet& qubit1, const CouplingSet& qubit2,
                                 std::size_t segments = 100, double segment_us = 5.0) {
  const auto h = reduce_to_logical(std::vector<CouplingSet>{qubit1, qubit2});
  Matrix ground = Matrix::Zero(2, 1);
  ground(0, 0) = 1.0;
  GrapeProblem p = make_problem(ControlSystem::from_logical(h), segments, segment_us, cnot_target(),
                                linalg::kron(ground, linalg::identity(4)));
  p.return_penalty = 1.0;
  return p;
}

namespace detail {

/// Divided difference of exp(-i tau x) at (a, b), stable for a -> b.
inline Complex exp_divided_difference(double a, double b, double tau) {
  const double half = 0.5 * tau * (a - b);
  const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
  return Complex(0.0, -tau) * std::exp(Complex(0.0, -0.5 * tau * (a + b))) * sinc;
}

struct MemberTerms {
  double value = 0.0;
  double fidelity = 0.0;
};

}  // namespace detail

struct ObjectiveValue {
  double value = 0.0;
  double nominal_fidelity = 0.0;
  std::vector<double> gradient;
};

/// Weighted ensemble objective sum_e w_e [F_e - lambda (1 - ||V^dagger U_e V||^2 / d)]
/// with F_e = |Tr(T^dagger V^dagger U_e V)| / d. With `want_gradient` the exact
/// derivative with respect to each amplitude is computed from the spectral
/// (Daleckii-Krein) form of each segment exponential.
inline ObjectiveValue evaluate_objective(const GrapeProblem& problem, const std::vector<double>& amplitudes,
                                         bool want_gradient = true) {
  const std::size_t n_seg = problem.segment_count();
  if (amplitudes.size() != n_seg) throw DomainError("amplitude vector length must equal segment count");
  const auto n = problem.system.dim();
  const Matrix v = problem.subspace_isometry.value_or(linalg::identity(n));
  const double d = static_cast<double>(problem.target.rows());
  const Matrix target_full_adj = v * problem.target.adjoint() * v.adjoint();

  ObjectiveValue out;
  if (want_gradient) out.gradient.assign(n_seg, 0.0);
  bool nominal_seen = false;

  std::vector<linalg::HermitianEigen> eig(n_seg);
  std::vector<Matrix> forward(n_seg + 1);
  for (const auto& member : problem.members()) {
    const NoiseModel noise{member.delta1, member.jitter_khz};
    forward[0] = linalg::identity(n);
    for (std::size_t k = 0; k < n_seg; ++k) {
      const ControlSegment seg{problem.durations_us[k], GrapeProblem::phase_of(k), amplitudes[k]};
      eig[k] = linalg::eigh(problem.system.generator(seg, noise));
      forward[k + 1] = linalg::expm_hermitian(eig[k], kRadPerKhzUs * seg.duration_us) * forward[k];
    }
    const Matrix& u = forward[n_seg];
    const Matrix block = v.adjoint() * u * v;
    const Complex g = (problem.target.adjoint() * block).trace();
    const double fidelity = std::abs(g) / d;
    const double norm2 = block.squaredNorm();
    out.value += member.weight * (fidelity - problem.return_penalty * (1.0 - norm2 / d));
    if (member.delta1 == 0.0 && member.jitter_khz == 0.0 && !nominal_seen) {
      out.nominal_fidelity = fidelity;
      nominal_seen = true;
    }
    if (!want_gradient) continue;

    const Matrix penalty_full = v * block.adjoint() * v.adjoint();
    Matrix backward = linalg::identity(n);  // U_N ... U_{k+1}
    for (std::size_t k = n_seg; k-- > 0;) {
      const double tau = kRadPerKhzUs * problem.durations_us[k];
      const Matrix& w = eig[k].vectors;
      const Matrix dh = (1.0 + member.delta1) * problem.system.drive(GrapeProblem::phase_of(k));
      const Matrix q = w.adjoint() * dh * w;
      const Matrix b_fid = w.adjoint() * forward[k] * target_full_adj * backward * w;
      const Matrix b_pen = w.adjoint() * forward[k] * penalty_full * backward * w;
      Complex dg = 0.0, dn = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const Complex du = detail::exp_divided_difference(eig[k].values(i), eig[k].values(j), tau) * q(i, j);
          dg += b_fid(j, i) * du;
          dn += b_pen(j, i) * du;
        }
      double grad = 0.0;
      if (std::abs(g) > 0.0) grad += (std::conj(g) * dg).real() / (std::abs(g) * d);
      grad += problem.return_penalty * 2.0 * dn.real() / d;
      out.gradient[k] += member.weight * grad;
      backward = backward * linalg::expm_hermitian(eig[k], tau);
    }
  }
  if (!nominal_seen) {
    const Matrix u = sequence_unitary(problem.system, problem.sequence(amplitudes));
    out.nominal_fidelity = gate_fidelity(u, problem.target, problem.subspace_isometry);
  }
  return out;
}

inline std::vector<double> gradient(const GrapeProblem& problem, const std::vector<double>& amplitudes) {
  return evaluate_objective(problem, amplitudes, true).gradient;
}

struct GrapeOptions {
  int restarts = 8;
  int max_iters = 3000;
  double gradient_tol = 1e-7;
  /// Stop a restart once the nominal fidelity reaches this value.
  std::optional<double> target_fidelity;
  double initial_amplitude_khz = 100.0;
  unsigned threads = 1;
};

enum class GrapeStatus { stationary, target_reached, max_iterations, line_search_failed };

inline const char* to_string(GrapeStatus s) {
  switch (s) {
    case GrapeStatus::stationary: return "stationary";
    case GrapeStatus::target_reached: return "target_reached";
    case GrapeStatus::max_iterations: return "max_iterations";
    case GrapeStatus::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

struct GrapeResult {
  PulseSequence sequence;
  std::vector<double> amplitudes;
  double fidelity = 0.0;   // nominal gate fidelity of `sequence`
  double objective = 0.0;  // final optimized objective
  std::vector<double> fidelity_trace;  // objective per accepted iterate, non-decreasing
  bool converged = false;
  GrapeStatus status = GrapeStatus::max_iterations;
  int restart = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

namespace detail {

inline double norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<double> initial_amplitudes(const GrapeProblem& problem, std::uint64_t seed, int restart,
                                              double scale) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::vector<double> x(problem.segment_count());
  const double bound = std::min(scale, problem.amplitude_bound_khz);
  for (auto& v : x) v = bound * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
  return x;
}

/// One restart: Polak-Ribiere conjugate-gradient ascent, backtracking line
/// search, amplitudes clamped to the bound. Only improving steps are accepted.
inline GrapeResult ascend(const GrapeProblem& problem, std::vector<double> x, const GrapeOptions& options) {
  const double bound = problem.amplitude_bound_khz;
  auto clamp = [bound](std::vector<double>& v) {
    for (auto& a : v) a = std::clamp(a, -bound, bound);
  };
  clamp(x);

  GrapeResult result;
  ObjectiveValue current = evaluate_objective(problem, x, true);
  result.fidelity_trace.push_back(current.value);
  std::vector<double> direction = current.gradient;
  std::vector<double> previous_gradient;
  double step = 1.0 / std::max(1e-12, detail::norm(current.gradient)) * 10.0;

  int iter = 0;
  for (; iter < options.max_iters; ++iter) {
    const double gnorm = detail::norm(current.gradient);
    if (options.target_fidelity && current.nominal_fidelity >= *options.target_fidelity) {
      result.status = GrapeStatus::target_reached;
      break;
    }
    if (gnorm < options.gradient_tol) {
      result.status = GrapeStatus::stationary;
      break;
    }
    if (!previous_gradient.empty()) {
      std::vector<double> diff(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) diff[i] = current.gradient[i] - previous_gradient[i];
      const double beta = std::max(0.0, detail::dot(current.gradient, diff) /
                                            detail::dot(previous_gradient, previous_gradient));
      for (std::size_t i = 0; i < x.size(); ++i) direction[i] = current.gradient[i] + beta * direction[i];
      if (detail::dot(direction, current.gradient) <= 0.0) direction = current.gradient;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) direction = current.gradient;
      const double slope = detail::dot(direction, current.gradient);
      double trial_step = step;
      for (int halving = 0; halving < 50; ++halving, trial_step *= 0.5) {
        std::vector<double> trial = x;
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] += trial_step * direction[i];
        clamp(trial);
        const double value = evaluate_objective(problem, trial, false).value;
        if (value > current.value && slope > 0.0) {
          x = std::move(trial);
          step = trial_step * 2.0;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      result.status = GrapeStatus::line_search_failed;
      break;
    }
    previous_gradient = current.gradient;
    current = evaluate_objective(problem, x, true);
    result.fidelity_trace.push_back(current.value);
  }
  if (iter == options.max_iters) result.status = GrapeStatus::max_iterations;

  result.amplitudes = x;
  result.sequence = problem.sequence(x);
  result.objective = current.value;
  result.iterations = iter;
  result.gradient_norm = detail::norm(current.gradient);
  result.converged = result.status == GrapeStatus::stationary || result.status == GrapeStatus::target_reached;
  // Reported fidelity comes from an independent re-simulation of the sequence.
  result.fidelity = gate_fidelity(sequence_unitary(problem.system, result.sequence), problem.target,
                                  problem.subspace_isometry);
  return result;
}

}  // namespace detail

/// Refines a given starting point (no restarts).
inline GrapeResult refine(const GrapeProblem& problem, const std::vector<double>& start,
                          const GrapeOptions& options = {}) {
  problem.validate();
  if (start.size() != problem.segment_count()) throw DomainError("start length must equal segment count");
  return detail::ascend(problem, start, options);
}

/// Multi-restart GRAPE. Restart r starts from amplitudes drawn with (seed, r);
/// the best restart by objective wins, lower restart index breaking ties.
inline GrapeResult optimize(const GrapeProblem& problem, std::uint64_t seed, const GrapeOptions& options = {}) {
  problem.validate();
  if (options.restarts < 1) throw DomainError("GRAPE needs at least one restart");
  std::vector<GrapeResult> runs(static_cast<std::size_t>(options.restarts));
  detail::parallel_for(runs.size(), options.threads, [&](std::size_t r) {
    auto start = detail::initial_amplitudes(problem, seed, static_cast<int>(r), options.initial_amplitude_khz);
    runs[r] = detail::ascend(problem, std::move(start), options);
    runs[r].restart = static_cast<int>(r);
    runs[r].seed = seed;
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective > runs[best].objective) best = r;
  return runs[best];
}

}  // namespace nvdfq
