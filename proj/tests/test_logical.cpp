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
#include "nvdfq/logical.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace nvdfq;

// Brute-force projection of the rotating-frame 12-dim Hamiltonian onto
// span{|0>, |e>} (x) span{S0, T0}, with trace removed.
oracle::M projected(const SceneGeometry& scene, Secularity sec, ActuatorTransition tr) {
  PhysicalConstants c;
  const Matrix h = build_total_hamiltonian(scene, c, sec).matrix -
                   linalg::kron(build_h_nv(c).matrix, linalg::identity(4));
  oracle::M v = oracle::M::Zero(12, 4);
  const double r = 1.0 / std::sqrt(2.0);
  const int excited = tr == ActuatorTransition::plus_one ? 0 : 2;
  for (int a = 0; a < 2; ++a) {
    const int level = a == 0 ? 1 : excited;
    v(4 * level + 1, 2 * a) = r;      // S0
    v(4 * level + 2, 2 * a) = -r;
    v(4 * level + 1, 2 * a + 1) = r;  // T0
    v(4 * level + 2, 2 * a + 1) = r;
  }
  oracle::M p = v.adjoint() * h * v;
  p -= p.trace() / 4.0 * oracle::id(4);
  return p;
}

oracle::M traceless(oracle::M m) {
  m -= m.trace() / static_cast<double>(m.rows()) * oracle::id(static_cast<int>(m.rows()));
  return m;
}

TEST(LogicalBasis, StatesAreOrthonormal) {
  const auto& b = LogicalBasis::get();
  EXPECT_TRUE(linalg::is_isometry(b.isometry));
  EXPECT_NEAR(std::abs(b.s0.dot(b.t0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.s0.dot(b.t_plus)), 0.0, 1e-15);
  EXPECT_NEAR(b.t_minus.norm(), 1.0, 1e-15);
}

TEST(LogicalBasis, SingletIsAntisymmetricUnderExchange) {
  const auto& b = LogicalBasis::get();
  Matrix exchange = Matrix::Zero(4, 4);
  exchange(0, 0) = exchange(3, 3) = exchange(1, 2) = exchange(2, 1) = 1.0;
  EXPECT_LT((exchange * b.s0 + b.s0).norm(), 1e-15);
  EXPECT_LT((exchange * b.t0 - b.t0).norm(), 1e-15);
}

TEST(LogicalBasis, LogicalOperatorsInTheSingletTripletBasis) {
  // The flip-flop I^L_x splits S0 from T0; I^L_z mixes them.
  const auto ops = LogicalBasis::get().logical_ops();
  EXPECT_LT((ops.x + oracle::sz()).norm(), 1e-15);
  EXPECT_LT((ops.y - oracle::sy()).norm(), 1e-15);
  EXPECT_LT((ops.z - oracle::sx()).norm(), 1e-15);
}

TEST(LogicalBasis, PairOperatorsMatchSpinDifferences) {
  // I^L_z = (I^p_z - I^q_z)/2 on the m = 0 block.
  const auto& b = LogicalBasis::get();
  const oracle::M diff = 0.5 * (oracle::kron(oracle::sz(), oracle::id(2)) - oracle::kron(oracle::id(2), oracle::sz()));
  EXPECT_LT((b.isometry.adjoint() * (b.pair_ops.z - diff) * b.isometry).norm(), 1e-15);
}

TEST(ActuatorOperators, ConventionOfTheTwoLevelActuator) {
  const auto a = ActuatorOperators::make();
  // index 0 = |0>, index 1 = |e>, so s_z = -sigma_z / 2 of the oracle basis.
  EXPECT_LT((a.z + oracle::sz()).norm(), 1e-15);
  EXPECT_LT((a.x - oracle::sx()).norm(), 1e-15);
  EXPECT_LT((linalg::commutator(a.x, a.y) - kI * a.z).norm(), 1e-15);
  EXPECT_NEAR(a.excited(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(a.excited(0, 0).real(), 0.0, 1e-15);
}

TEST(Reduction, MatchesBruteForceProjection) {
  for (const auto& scene : {scenes::swap_case_one(), scenes::swap_case_two()}) {
    for (auto tr : {ActuatorTransition::plus_one, ActuatorTransition::minus_one}) {
      PhysicalConstants c;
      const auto h = reduce_to_logical({pair_couplings(scene, 0, c)}, 0.0, 0.0, tr);
      const oracle::M ref = projected(scene, Secularity::electron_and_nuclear, tr);
      EXPECT_LT((traceless(h.matrix()) - ref).norm(), 1e-9 * ref.norm());
    }
  }
}

TEST(Reduction, ElectronSecularProjectionAgreesOnTheBlock) {
  // The S_z I_x, S_z I_y terms only couple the block to T+-, so the block
  // itself is unchanged by the nuclear truncation.
  const auto scene = scenes::swap_case_one();
  const oracle::M a = projected(scene, Secularity::electron, ActuatorTransition::plus_one);
  const oracle::M b = projected(scene, Secularity::electron_and_nuclear, ActuatorTransition::plus_one);
  EXPECT_LT((a - b).norm(), 1e-9 * b.norm());
}

TEST(Reduction, RotationRatesOfCaseOne) {
  const auto c = pair_couplings(scenes::swap_case_one(), 0);
  const auto axes = rotation_axes(c);
  EXPECT_NEAR(axes.omega0_khz, 12.7, 0.05);
  EXPECT_NEAR(axes.omega_pm1_khz, 17.5, 0.05);
  EXPECT_NEAR(axes.n_plus1.norm(), 1.0, 1e-15);
  EXPECT_NEAR(axes.n_plus1.dot(axes.n_minus1), (c.A_khz * c.A_khz - 4 * c.B_khz * c.B_khz) / (axes.omega_pm1_khz * axes.omega_pm1_khz), 1e-14);
}

TEST(Reduction, ParkedActuatorRotatesAboutTheStatedAxis) {
  const auto c = pair_couplings(scenes::swap_case_one(), 0);
  const auto h = reduce_to_logical(c);
  const auto axes = rotation_axes(c);
  const double t = 23.0;
  const Matrix u = linalg::expm_hermitian(h.matrix(), kRadPerKhzUs * t);
  const oracle::M l[3] = {-oracle::sz(), oracle::sy(), oracle::sx()};
  for (int level : {0, 1}) {
    const Vec3 n = axes.axis(level);
    const oracle::M gen = n(0) * l[0] + n(1) * l[1] + n(2) * l[2];
    const oracle::M ref = oracle::propagator(axes.rate(level) * gen, t);
    const oracle::M block = u.block(2 * level, 2 * level, 2, 2);
    EXPECT_LT((block - ref).norm(), 1e-10) << "level " << level;
  }
}

TEST(Reduction, DriveTermsAndPhase) {
  const auto h = reduce_to_logical(CouplingSet{-3.0, 2.0, {}}, 50.0, kPi / 2);
  const Matrix drive = h.matrix() - h.free_matrix();
  EXPECT_LT((drive - 50.0 * h.drive_y()).norm(), 1e-12);
  EXPECT_EQ(h.dim(), 4);
  const auto two = reduce_to_logical({CouplingSet{1.0, 2.0, {}}, CouplingSet{3.0, 4.0, {}}});
  EXPECT_EQ(two.dim(), 8);
  EXPECT_LT((two.coupling_derivative() - (two.free_matrix() - reduce_to_logical({CouplingSet{1.0, 1.0, {}}, CouplingSet{3.0, 3.0, {}}}).free_matrix())).norm(), 1e-12);
}

TEST(Reduction, InvalidCouplingsThrow) {
  EXPECT_THROW(reduce_to_logical(std::vector<CouplingSet>{}), DomainError);
  EXPECT_THROW(reduce_to_logical(CouplingSet{std::nan(""), 1.0, {}}), DomainError);
  EXPECT_THROW(rotation_axes(CouplingSet{0.0, 0.0, {}}), DomainError);
}

TEST(Leakage, ZeroUnderDoubleSecularEvolution) {
  PhysicalConstants c;
  for (const auto& scene : {scenes::swap_case_one(), scenes::swap_case_two(), scenes::two_qubit(0.85)}) {
    const auto h = build_total_hamiltonian(scene, c, Secularity::electron_and_nuclear);
    for (double t : {10.0, 137.0, 1000.0}) {
      const Matrix u = linalg::expm_hermitian(h.matrix, kRadPerKhzUs * t);
      for (std::size_t m = 0; m < scene.pairs.size(); ++m)
        EXPECT_LT(leakage(u, df_subspace_isometry(h.layout, m)), 1e-10);
    }
  }
}

TEST(Leakage, NonzeroWithFullTensors) {
  PhysicalConstants c;
  const auto scene = scenes::swap_case_one();
  const auto h = build_total_hamiltonian(scene, c, Secularity::none);
  const Matrix u = linalg::expm_hermitian(h.matrix, kRadPerKhzUs * 100.0);
  const double l = leakage(u, df_subspace_isometry(h.layout, 0));
  EXPECT_GT(l, 0.0);
  EXPECT_LT(l, 1e-2);
}

TEST(Leakage, FullTransferOutOfTheBlock) {
  Matrix u = Matrix::Identity(4, 4);
  // Swap |up,down> with |up,up>; the input |up,down> = (S0 + T0)/sqrt2 leaves entirely.
  u(0, 0) = u(1, 1) = 0.0;
  u(0, 1) = u(1, 0) = 1.0;
  EXPECT_NEAR(leakage(u, LogicalBasis::get()), 1.0, 1e-12);
  Matrix swap = Matrix::Identity(4, 4);
  swap(0, 0) = swap(3, 3) = 0.0;
  swap(0, 3) = swap(3, 0) = 1.0;
  EXPECT_NEAR(leakage(swap, LogicalBasis::get()), 0.0, 1e-15);
}

TEST(Leakage, RejectsBadInputs) {
  EXPECT_THROW(leakage(2.0 * Matrix::Identity(4, 4), LogicalBasis::get()), DomainError);
  EXPECT_THROW(leakage(Matrix::Identity(6, 6), LogicalBasis::get()), DomainError);
  EXPECT_THROW(df_subspace_isometry(HilbertSpaceLayout::actuator_and_pairs(3, 1), 1), DomainError);
}

TEST(Embedding, LogicalEmbeddingIsAnIsometryIntoTheLabSpace) {
  for (auto tr : {ActuatorTransition::plus_one, ActuatorTransition::minus_one}) {
    const Matrix v = logical_embedding(tr);
    EXPECT_EQ(v.rows(), 12);
    EXPECT_EQ(v.cols(), 4);
    EXPECT_TRUE(linalg::is_isometry(v));
  }
}

}  // namespace
