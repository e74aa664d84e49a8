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
#include "nvdfq/geometry.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace nvdfq;

// Oracle B: half the difference of the actuator-nucleus zz couplings, built
// directly from SI constants.
double oracle_b(const oracle::V3& actuator, const oracle::V3& p, const oracle::V3& q) {
  return 0.5 * (oracle::dipolar_khz(p - actuator, oracle::gamma_e, oracle::gamma_p)(2, 2) -
                oracle::dipolar_khz(q - actuator, oracle::gamma_e, oracle::gamma_p)(2, 2));
}

double oracle_a(double theta, double phi) {
  const auto d = oracle::dipolar_khz(oracle::spherical(0.1635, theta, phi), oracle::gamma_p, oracle::gamma_p);
  return 0.5 * (d(0, 0) + d(1, 1));
}

TEST(DipoleTensor, MatchesSiOracleOnRandomSeparations) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 r(u(rng), u(rng), u(rng));
    if (r.norm() < 0.05) continue;
    const Mat3 lib = dipole_tensor(r, oracle::gamma_e, oracle::gamma_p);
    const auto ref = oracle::dipolar_khz(r, oracle::gamma_e, oracle::gamma_p);
    EXPECT_LT((lib - ref).norm(), 1e-10 * ref.norm());
  }
}

TEST(DipoleTensor, IsSymmetricAndTraceless) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec3 r(u(rng), u(rng), u(rng) + 1.5);
    const Mat3 d = dipole_tensor(r, oracle::gamma_p, oracle::gamma_p);
    EXPECT_LT((d - d.transpose()).norm(), 1e-12 * d.norm());
    EXPECT_NEAR(d.trace(), 0.0, 1e-12 * d.norm());
  }
}

TEST(DipoleTensor, ZeroSeparationIsAGeometryError) {
  EXPECT_THROW(dipole_tensor(Vec3::Zero(), 1.0, 1.0), GeometryError);
  EXPECT_THROW(dipolar_prefactor_khz(0.0, 1.0, 1.0), GeometryError);
}

TEST(DipoleTensor, InverseCubeScaling) {
  const Vec3 n = Vec3(0.3, -0.2, 0.9).normalized();
  const Mat3 d1 = dipole_tensor(n, oracle::gamma_p, oracle::gamma_p);
  const Mat3 d2 = dipole_tensor(2.0 * n, oracle::gamma_p, oracle::gamma_p);
  EXPECT_LT((d1 - 8.0 * d2).norm(), 1e-12 * d1.norm());
}

TEST(CouplingA, CaseOneAndTwoValues) {
  const double a1 = coupling_A({kWaterProtonSeparationNm, 0.45 * kPi, 0.0});
  const double a2 = coupling_A({kWaterProtonSeparationNm, 0.35 * kPi, 0.0});
  EXPECT_NEAR(a1, -12.7, 0.1);
  EXPECT_NEAR(a2, -5.2, 0.1);
  EXPECT_NEAR(a1, oracle_a(0.45 * kPi, 0.0), 1e-9);
  EXPECT_NEAR(a2, oracle_a(0.35 * kPi, 0.0), 1e-9);
}

TEST(CouplingA, DependsOnlyOnPolarAngle) {
  for (double phi : {0.0, 0.3, 1.7, 4.0})
    EXPECT_NEAR(coupling_A({kWaterProtonSeparationNm, 0.45 * kPi, phi}), coupling_A({kWaterProtonSeparationNm, 0.45 * kPi, 0.0}), 1e-10);
}

TEST(CouplingB, CaseOneAndTwoValues) {
  const auto s1 = scenes::swap_case_one();
  const auto s2 = scenes::swap_case_two();
  const auto c1 = pair_couplings(s1, 0);
  const auto c2 = pair_couplings(s2, 0);
  EXPECT_NEAR(c1.B_khz, -6.0, 0.2);
  EXPECT_NEAR(c2.B_khz, -6.7, 0.2);
  EXPECT_NEAR(c1.B_khz, oracle_b(s1.actuator, s1.pairs[0].p(), s1.pairs[0].q()), 1e-9);
  EXPECT_NEAR(c2.B_khz, oracle_b(s2.actuator, s2.pairs[0].p(), s2.pairs[0].q()), 1e-9);
}

TEST(CouplingB, SpinPPlacementFollowsTheActuatorVector) {
  const SphericalPlacement to_p{1.3, 0.05 * kPi, 0.2 * kPi};
  const auto scene = scenes::swap_case_one();
  EXPECT_LT((scene.pairs[0].p() - scene.actuator - oracle::spherical(1.3, 0.05 * kPi, 0.2 * kPi)).norm(), 1e-12);
  EXPECT_NEAR((scene.pairs[0].q() - scene.pairs[0].p()).norm(), kWaterProtonSeparationNm, 1e-12);
  EXPECT_NEAR(coupling_B(to_p, {kWaterProtonSeparationNm, 0.45 * kPi, 0.0}), pair_couplings(scene, 0).B_khz, 1e-12);
}

TEST(CouplingB, ChangesSignWhenPAndQSwap) {
  const auto scene = scenes::swap_case_one();
  SpinPair flipped = scene.pairs[0];
  flipped.axis.theta = kPi - flipped.axis.theta;
  flipped.axis.phi += kPi;
  EXPECT_NEAR(pair_coupling_B(scene.actuator, flipped), -pair_couplings(scene, 0).B_khz, 1e-10);
}

TEST(CouplingB, ActuatorOnANucleusIsRejected) {
  const auto scene = scenes::swap_case_one();
  EXPECT_THROW(pair_coupling_B(scene.pairs[0].p(), scene.pairs[0]), GeometryError);
  SceneGeometry bad = scene;
  bad.actuator = scene.pairs[0].q();
  EXPECT_THROW(bad.validate(), GeometryError);
}

TEST(Placement, ValidationRejectsBadValues) {
  EXPECT_THROW((SphericalPlacement{0.0, 0.1, 0.0}.validate()), GeometryError);
  EXPECT_THROW((SphericalPlacement{1.0, -0.1, 0.0}.validate()), GeometryError);
  EXPECT_THROW((SphericalPlacement{1.0, 4.0, 0.0}.validate()), GeometryError);
  EXPECT_THROW(SceneGeometry{}.validate(), GeometryError);
}

TEST(TwoQubitScene, CouplingsAtTheWorkingPoint) {
  const auto scene = scenes::two_qubit(0.85);
  const auto c1 = pair_couplings(scene, 0), c2 = pair_couplings(scene, 1);
  EXPECT_NEAR(c1.B_khz, 8.0, 0.1);
  EXPECT_NEAR(c2.B_khz, -3.7, 0.1);
  EXPECT_NEAR(c1.A_khz, -12.7, 0.1);
  EXPECT_NEAR(c2.A_khz, -5.2, 0.1);
  EXPECT_NEAR(c1.B_khz, oracle_b(scene.actuator, scene.pairs[0].p(), scene.pairs[0].q()), 1e-9);
}

TEST(TwoQubitScene, ProfileRowsMatchSceneCouplings) {
  const std::vector<double> ds{0.0, 0.5, 0.85, 1.2, 2.0};
  const auto rows = two_qubit_profile(ds);
  ASSERT_EQ(rows.size(), ds.size());
  for (const auto& r : rows) {
    const auto scene = scenes::two_qubit(r.displacement_nm);
    EXPECT_DOUBLE_EQ(r.B1_khz, pair_couplings(scene, 0).B_khz);
    EXPECT_DOUBLE_EQ(r.B2_khz, pair_couplings(scene, 1).B_khz);
  }
  // Moving toward qubit 2 strengthens B2 relative to the start of the sweep.
  EXPECT_GT(std::abs(rows.back().B2_khz), std::abs(rows.front().B2_khz));
}

TEST(Histogram, BinsByMagnitudeAndNormalizes) {
  Histogram h;
  h.bin_width_khz = 0.5;
  for (double v : {0.1, -0.2, 0.6, -1.4, 1.49, 3.0}) h.add(v);
  EXPECT_EQ(h.total(), 6u);
  EXPECT_EQ(h.counts[0], 2u);
  EXPECT_EQ(h.counts[1], 1u);
  EXPECT_EQ(h.counts[2], 2u);
  EXPECT_EQ(h.counts[6], 1u);
  double mass = 0.0;
  for (double m : h.probability_mass()) mass += m;
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(h.nonempty_bins(), 4u);
  Histogram other;
  other.add(0.3);
  h.merge(other);
  EXPECT_EQ(h.counts[0], 3u);
}

CouplingMapRequest small_request() {
  CouplingMapRequest req;
  req.h_steps = 3;
  req.d_steps = 3;
  req.azimuth_steps = 4;
  req.orientation_samples = 200;
  return req;
}

TEST(CouplingMaps, DeterministicForAFixedSeed) {
  const auto a = coupling_maps(small_request());
  const auto b = coupling_maps(small_request());
  EXPECT_EQ(a.abs_B.counts, b.abs_B.counts);
  EXPECT_EQ(a.abs_B_prime.counts, b.abs_B_prime.counts);
  EXPECT_EQ(a.max_abs_B_prime_khz, b.max_abs_B_prime_khz);
  auto req = small_request();
  req.seed = 99;
  EXPECT_NE(coupling_maps(req).abs_B.counts, a.abs_B.counts);
}

TEST(CouplingMaps, SampleCountMatchesTheGrid) {
  const auto req = small_request();
  const auto maps = coupling_maps(req);
  // d = 0 has a single azimuth.
  const std::uint64_t points = req.h_steps * (1 + (req.d_steps - 1) * req.azimuth_steps);
  EXPECT_EQ(maps.abs_A.total(), points * req.orientation_samples);
  EXPECT_EQ(maps.abs_B.total(), maps.abs_B_prime.total());
}

TEST(CouplingMaps, AValuesNeverExceedTheAxialBound) {
  // A = b (1 - 3 sin^2 theta / 2) lies in [-b/2, b].
  const double b = dipolar_prefactor_khz(kWaterProtonSeparationNm, oracle::gamma_p, oracle::gamma_p);
  const auto maps = coupling_maps(small_request());
  const double top = maps.abs_A.bin_width_khz * static_cast<double>(maps.abs_A.counts.size());
  EXPECT_LE(top, b + maps.abs_A.bin_width_khz);
}

TEST(CouplingMaps, FixedOrientationAtOnePointGivesOneRow) {
  CouplingMapRequest req;
  req.h_min_nm = req.h_max_nm = 1.3;
  req.h_steps = 1;
  req.d_steps = 1;
  req.orientation_samples = 0;
  req.fixed_orientation = SphericalPlacement{kWaterProtonSeparationNm, 0.45 * kPi, 0.0};
  const auto maps = coupling_maps(req);
  EXPECT_EQ(maps.abs_A.nonempty_bins(), 1u);
  EXPECT_EQ(maps.abs_B.nonempty_bins(), 1u);
  EXPECT_EQ(maps.abs_B_prime.nonempty_bins(), 1u);
}

TEST(CouplingMaps, InvalidRequestsAreRejected) {
  CouplingMapRequest req;
  req.h_steps = 0;
  EXPECT_THROW(coupling_maps(req), DomainError);
  req = CouplingMapRequest{};
  req.orientation_samples = 0;
  EXPECT_THROW(coupling_maps(req), DomainError);
  req = CouplingMapRequest{};
  req.bin_width_khz = 0.0;
  EXPECT_THROW(coupling_maps(req), DomainError);
}

TEST(CouplingMaps, NeighbourCouplingStaysBelowAFifthOfB) {
  const auto maps = coupling_maps(small_request());
  ASSERT_GT(maps.regime_samples, 0u);
  EXPECT_LT(maps.max_ratio_in_regime, 0.2);
  EXPECT_LT(maps.max_abs_B_prime_khz, 6.0 / 5.0);
}

}  // namespace
