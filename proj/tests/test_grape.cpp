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
#include "nvdfq/grape.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace nvdfq;

CouplingSet case_one() { return pair_couplings(scenes::swap_case_one(), 0); }
CouplingSet case_two() { return pair_couplings(scenes::swap_case_two(), 0); }

std::vector<double> random_amplitudes(std::size_t n, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

// Frame map taking actuator |0>, |e> onto the pair states |down,up>, |up,down>
// written in the S0/T0 basis.
oracle::M frame_map() {
  const double r = 1.0 / std::sqrt(2.0);
  oracle::M f(2, 2);
  f << -r, r, r, r;
  return f;
}

double central_difference(const GrapeProblem& p, std::vector<double> x, std::size_t k, double h) {
  x[k] += h;
  const double up = evaluate_objective(p, x, false).value;
  x[k] -= 2.0 * h;
  const double down = evaluate_objective(p, x, false).value;
  return (up - down) / (2.0 * h);
}

void expect_gradient_matches(const GrapeProblem& p, const std::vector<double>& x) {
  const auto g = gradient(p, x);
  double scale = 0.0, err = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    scale = std::max(scale, std::abs(g[k]));
    err = std::max(err, std::abs(g[k] - central_difference(p, x, k, 1e-4)));
  }
  ASSERT_GT(scale, 0.0);
  EXPECT_LT(err / scale, 1e-5);
}

TEST(Targets, SwapIsAnInvolutionThatExchangesFrames) {
  const Matrix s = swap_target();
  EXPECT_TRUE(linalg::is_unitary(s, 1e-14));
  EXPECT_LT((s * s - Matrix::Identity(4, 4)).norm(), 1e-14);
  EXPECT_LT((s - s.adjoint()).norm(), 1e-14);
  std::mt19937_64 rng(41);
  const oracle::M f = frame_map();
  for (int k = 0; k < 10; ++k) {
    const oracle::M x = oracle::haar(2, rng).col(0), y = oracle::haar(2, rng).col(0);
    const oracle::M in = oracle::kron(x, f * y), out = oracle::kron(y, f * x);
    EXPECT_LT((s * in - out).norm(), 1e-14);
  }
}

TEST(Targets, SwapTurnsTheHalfPiStateIntoTheSinglet) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector act(2);
  act << r, -r;  // (|0> - |e>)/sqrt2
  Vector df(2);
  df << 0.0, 1.0;
  const Vector out = swap_target() * linalg::kron(act, df);
  // The DF qubit ends in |0_L> = S0 up to sign, with the actuator left in a pure state.
  const Matrix rho = out * out.adjoint();
  const Matrix df_rho = partial_trace_first(rho, 2);
  EXPECT_NEAR(df_rho(0, 0).real(), 1.0, 1e-14);
}

TEST(Targets, CnotTruthTable) {
  const Matrix c = cnot_target();
  EXPECT_LT((c * c - Matrix::Identity(4, 4)).norm(), 1e-15);
  EXPECT_EQ(c(0, 0), Complex(1.0));
  EXPECT_EQ(c(1, 1), Complex(1.0));
  EXPECT_EQ(c(3, 2), Complex(1.0));  // |10> -> |11>
  EXPECT_EQ(c(2, 3), Complex(1.0));
}

TEST(Gradient, MatchesCentralDifferencesOnRandomProblems) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int trial = 0; trial < 6; ++trial) {
    const CouplingSet c{u(rng), u(rng), {}};
    auto p = swap_problem(c, 10, 1.5);
    if (trial % 2) p.ensemble = {{-0.02, 0.0, 1.0}, {0.0, 0.0, 2.0}, {0.03, 0.1, 1.0}};
    expect_gradient_matches(p, random_amplitudes(10, 400.0, rng));
  }
}

TEST(Gradient, MatchesCentralDifferencesWithTheReturnPenalty) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-15.0, 15.0);
  for (int trial = 0; trial < 3; ++trial) {
    auto p = cnot_problem({u(rng), u(rng), {}}, {u(rng), u(rng), {}}, 10, 5.0);
    if (trial == 2) p.ensemble = delta1_ensemble();
    expect_gradient_matches(p, random_amplitudes(10, 200.0, rng));
  }
}

TEST(Gradient, ZeroDurationSegmentsContributeNothing) {
  std::mt19937_64 rng(44);
  auto p = swap_problem(case_one(), 10, 1.5);
  p.durations_us[3] = 0.0;
  p.durations_us[7] = 0.0;
  const auto x = random_amplitudes(10, 300.0, rng);
  const auto g = gradient(p, x);
  EXPECT_EQ(g[3], 0.0);
  EXPECT_EQ(g[7], 0.0);
  EXPECT_NE(g[4], 0.0);
  EXPECT_EQ(p.sequence(x).segments.size(), 8u);
  EXPECT_NEAR(evaluate_objective(p, x, false).nominal_fidelity,
              gate_fidelity(sequence_unitary(p.system, p.sequence(x)), p.target), 1e-12);
}

TEST(Gradient, LengthMismatchThrows) {
  const auto p = swap_problem(case_one(), 10, 1.5);
  EXPECT_THROW(gradient(p, std::vector<double>(9, 0.0)), DomainError);
}

TEST(Objective, PenaltyVanishesForABlockDiagonalUnitary) {
  auto p = cnot_problem(CouplingSet{0.0, 0.0, {}}, CouplingSet{0.0, 0.0, {}}, 2, 5.0);
  const auto v = evaluate_objective(p, {0.0, 0.0}, false);
  // U = 1: block is the identity, F = |Tr CNOT| / 4 = 1/2 and the actuator returns fully.
  EXPECT_NEAR(v.value, 0.5, 1e-14);
  EXPECT_NEAR(v.nominal_fidelity, 0.5, 1e-14);
}

GrapeOptions quick(int restarts = 2, int iters = 60) {
  GrapeOptions o;
  o.restarts = restarts;
  o.max_iters = iters;
  return o;
}

TEST(Optimize, TraceIsMonotoneAndFidelityIsReproduced) {
  const auto p = swap_problem(case_one(), 20, 1.5);
  const auto r = optimize(p, 5, quick());
  ASSERT_GE(r.fidelity_trace.size(), 2u);
  for (std::size_t i = 1; i < r.fidelity_trace.size(); ++i) EXPECT_GE(r.fidelity_trace[i], r.fidelity_trace[i - 1]);
  EXPECT_GT(r.fidelity_trace.back(), r.fidelity_trace.front());
  const double resim = gate_fidelity(sequence_unitary(p.system, r.sequence), p.target);
  EXPECT_NEAR(r.fidelity, resim, 1e-9);
  EXPECT_DOUBLE_EQ(r.objective, r.fidelity_trace.back());
}

TEST(Optimize, DeterministicForAFixedSeedAndThreadCount) {
  const auto p = swap_problem(case_one(), 16, 1.5);
  auto opt = quick(3, 40);
  const auto a = optimize(p, 77, opt);
  const auto b = optimize(p, 77, opt);
  opt.threads = 3;
  const auto c = optimize(p, 77, opt);
  EXPECT_EQ(a.amplitudes, b.amplitudes);
  EXPECT_EQ(a.amplitudes, c.amplitudes);
  EXPECT_EQ(a.restart, c.restart);
  EXPECT_NE(optimize(p, 78, quick(3, 40)).amplitudes, a.amplitudes);
}

TEST(Optimize, RespectsTheAmplitudeBound) {
  auto p = swap_problem(case_one(), 20, 1.5);
  p.amplitude_bound_khz = 40.0;
  auto opt = quick(2, 80);
  opt.initial_amplitude_khz = 500.0;
  const auto r = optimize(p, 3, opt);
  for (double a : r.amplitudes) EXPECT_LE(std::abs(a), 40.0);
}

TEST(Optimize, ReachesAStationaryPointOnASmallProblem) {
  const auto p = swap_problem(case_one(), 10, 1.5);
  GrapeOptions opt;
  opt.restarts = 1;
  const auto r = optimize(p, 9, opt);
  EXPECT_TRUE(r.status == GrapeStatus::stationary || r.status == GrapeStatus::line_search_failed)
      << to_string(r.status);
  EXPECT_LT(r.gradient_norm, 1e-6 * 10);
}

TEST(Optimize, TargetFidelityStopsEarly) {
  const auto p = swap_problem(case_one(), 100, 1.5);
  GrapeOptions opt;
  opt.restarts = 1;
  opt.target_fidelity = 0.9;
  const auto r = optimize(p, 1, opt);
  EXPECT_EQ(r.status, GrapeStatus::target_reached);
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.fidelity, 0.9);
}

TEST(Optimize, SwapCaseTwoReachesHighFidelity) {
  const auto p = swap_problem(case_two(), 100, 1.5);
  GrapeOptions opt;
  opt.target_fidelity = 0.999;
  const auto r = optimize(p, 2022, opt);
  EXPECT_GE(r.fidelity, 0.99);
  for (double a : r.amplitudes) EXPECT_LE(std::abs(a), p.amplitude_bound_khz);
}

TEST(Optimize, IllPosedProblemsThrow) {
  auto p = swap_problem(case_one(), 10, 1.5);
  p.target = 2.0 * Matrix::Identity(4, 4);
  EXPECT_THROW(optimize(p, 1, quick()), DomainError);
  p = swap_problem(case_one(), 10, 1.5);
  p.target = Matrix::Identity(2, 2);
  EXPECT_THROW(optimize(p, 1, quick()), DomainError);
  p = swap_problem(case_one(), 10, 1.5);
  p.amplitude_bound_khz = 0.0;
  EXPECT_THROW(optimize(p, 1, quick()), DomainError);
  p = swap_problem(case_one(), 10, 1.5);
  p.durations_us.clear();
  EXPECT_THROW(optimize(p, 1, quick()), DomainError);
  p = swap_problem(case_one(), 10, 1.5);
  EXPECT_THROW(optimize(p, 1, quick(0)), DomainError);
  EXPECT_THROW(refine(p, std::vector<double>(3, 0.0)), DomainError);
  p.ensemble = {{0.5, 0.0, 1.0}};
  EXPECT_THROW(optimize(p, 1, quick()), DomainError);
}

TEST(Optimize, StatusNames) {
  EXPECT_STREQ(to_string(GrapeStatus::stationary), "stationary");
  EXPECT_STREQ(to_string(GrapeStatus::line_search_failed), "line_search_failed");
}

}  // namespace
