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

#include "nvdfq/constants.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace nvdfq {

/// Proton-proton distance inside H2O.
inline constexpr double kWaterProtonSeparationNm = 0.1635;

/// Spherical placement: theta from the NV (z) axis, phi from x in the xy plane.
struct SphericalPlacement {
  double r_nm = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  Vec3 cartesian() const {
    return r_nm * Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                       std::cos(theta));
  }

  void validate() const {
    if (!(r_nm > 0.0)) throw GeometryError("placement radius must be positive");
    if (!(theta >= 0.0 && theta <= kPi)) throw GeometryError("placement theta must lie in [0, pi]");
  }
};

/// A nuclear spin pair P,Q. P sits at midpoint - axis/2, Q at midpoint + axis/2,
/// so `axis` points from P to Q.
struct SpinPair {
  Vec3 midpoint = Vec3::Zero();
  SphericalPlacement axis{kWaterProtonSeparationNm, kPi / 2, 0.0};

  Vec3 p() const { return midpoint - 0.5 * axis.cartesian(); }
  Vec3 q() const { return midpoint + 0.5 * axis.cartesian(); }

  /// Builds the pair from the position of spin P and the P->Q axis.
  static SpinPair from_p(const Vec3& p_position, const SphericalPlacement& axis) {
    return {p_position + 0.5 * axis.cartesian(), axis};
  }
};

/// Actuator position plus every nuclear spin pair, in nm.
struct SceneGeometry {
  Vec3 actuator = Vec3::Zero();
  std::vector<SpinPair> pairs;
  double lattice_spacing_nm = 2.0;

  void validate() const {
    if (pairs.empty()) throw GeometryError("scene has no spin pairs");
    if (!(lattice_spacing_nm > 0.0)) throw GeometryError("lattice spacing must be positive");
    for (const auto& pair : pairs) {
      pair.axis.validate();
      if ((pair.p() - actuator).norm() < 1e-9 || (pair.q() - actuator).norm() < 1e-9)
        throw GeometryError("actuator coincides with a nuclear spin");
    }
  }
};

/// Reduced couplings of one DF qubit (kHz).
struct CouplingSet {
  double A_khz = 0.0;
  double B_khz = 0.0;
  std::optional<double> B_prime_khz;
};

/// Point-dipole prefactor b = mu0 g1 g2 hbar / (4 pi r^3) / (2 pi), in kHz.
inline double dipolar_prefactor_khz(double r_nm, double gamma1, double gamma2,
                                    const PhysicalConstants& c = {}) {
  if (!(r_nm > 0.0)) throw GeometryError("dipolar coupling needs a nonzero separation");
  const double r_m = r_nm * 1e-9;
  return c.vacuum_permeability_factor * gamma1 * gamma2 * c.reduced_planck /
         (r_m * r_m * r_m) / (2.0 * kPi) * 1e-3;
}

/// Dipolar interaction tensor D_ij = b (delta_ij - 3 n_i n_j), kHz.
inline Mat3 dipole_tensor(const Vec3& separation_nm, double gamma1, double gamma2,
                          const PhysicalConstants& c = {}) {
  const double r = separation_nm.norm();
  if (!(r > 0.0)) throw GeometryError("dipolar coupling needs a nonzero separation");
  const Vec3 n = separation_nm / r;
  return dipolar_prefactor_khz(r, gamma1, gamma2, c) * (Mat3::Identity() - 3.0 * n * n.transpose());
}

inline Mat3 proton_proton_tensor(const SpinPair& pair, const PhysicalConstants& c = {}) {
  return dipole_tensor(pair.q() - pair.p(), c.gyromagnetic_ratio_proton,
                       c.gyromagnetic_ratio_proton, c);
}

inline Mat3 actuator_nucleus_tensor(const Vec3& actuator, const Vec3& nucleus,
                                    const PhysicalConstants& c = {}) {
  return dipole_tensor(nucleus - actuator, c.gyromagnetic_ratio_electron,
                       c.gyromagnetic_ratio_proton, c);
}

/// A = (D^pq_xx + D^pq_yy) / 2 for a proton pair along `pair_axis`.
inline double coupling_A(const SphericalPlacement& pair_axis, const PhysicalConstants& c = {}) {
  pair_axis.validate();
  const Mat3 d = dipole_tensor(pair_axis.cartesian(), c.gyromagnetic_ratio_proton,
                               c.gyromagnetic_ratio_proton, c);
  return 0.5 * (d(0, 0) + d(1, 1));
}

/// B = (D^p_zz - D^q_zz) / 2 for an actuator at `actuator` and the given pair.
inline double pair_coupling_B(const Vec3& actuator, const SpinPair& pair,
                              const PhysicalConstants& c = {}) {
  const Vec3 p = pair.p() - actuator;
  const Vec3 q = pair.q() - actuator;
  if (p.norm() < 1e-9 || q.norm() < 1e-9)
    throw GeometryError("actuator coincides with a nuclear spin");
  return 0.5 * (actuator_nucleus_tensor(actuator, pair.p(), c)(2, 2) -
                actuator_nucleus_tensor(actuator, pair.q(), c)(2, 2));
}

/// B for spin P placed at `actuator_to_p` from the actuator and Q = P + pair axis.
inline double coupling_B(const SphericalPlacement& actuator_to_p,
                         const SphericalPlacement& pair_axis, const PhysicalConstants& c = {}) {
  actuator_to_p.validate();
  pair_axis.validate();
  return pair_coupling_B(Vec3::Zero(), SpinPair::from_p(actuator_to_p.cartesian(), pair_axis), c);
}

inline CouplingSet pair_couplings(const SceneGeometry& scene, std::size_t index,
                                  const PhysicalConstants& c = {}) {
  if (index >= scene.pairs.size()) throw DomainError("pair index out of range");
  const SpinPair& pair = scene.pairs[index];
  return {coupling_A(pair.axis, c), pair_coupling_B(scene.actuator, pair, c), std::nullopt};
}

namespace scenes {

/// One pair, actuator at the origin, P at `actuator_to_p`.
inline SceneGeometry single_pair(const SphericalPlacement& actuator_to_p,
                                 const SphericalPlacement& pair_axis) {
  SceneGeometry scene;
  scene.pairs.push_back(SpinPair::from_p(actuator_to_p.cartesian(), pair_axis));
  return scene;
}

/// A = -12.7 kHz, B = -6.0 kHz.
inline SceneGeometry swap_case_one() {
  return single_pair({1.3, 0.05 * kPi, 0.2 * kPi}, {kWaterProtonSeparationNm, 0.45 * kPi, 0.0});
}

/// A = -5.2 kHz, B = -6.7 kHz.
inline SceneGeometry swap_case_two() {
  return single_pair({1.4, 0.07 * kPi, 0.1 * kPi}, {kWaterProtonSeparationNm, 0.35 * kPi, 0.0});
}

/// Two pairs along x, the actuator at height h and displacement d from pair 1.
struct TwoQubitLayout {
  double spacing_nm = 2.0;
  double height_nm = 1.0;
  SphericalPlacement axis1{kWaterProtonSeparationNm, 0.45 * kPi, 0.0};
  SphericalPlacement axis2{kWaterProtonSeparationNm, 0.35 * kPi, 0.0};
};

inline SceneGeometry two_qubit(double displacement_nm, const TwoQubitLayout& layout = {}) {
  SceneGeometry scene;
  scene.lattice_spacing_nm = layout.spacing_nm;
  scene.actuator = Vec3(displacement_nm, 0.0, layout.height_nm);
  scene.pairs.push_back({Vec3::Zero(), layout.axis1});
  scene.pairs.push_back({Vec3(layout.spacing_nm, 0.0, 0.0), layout.axis2});
  return scene;
}

}  // namespace scenes

struct ProfileRow {
  double displacement_nm;
  double B1_khz;
  double B2_khz;
};

/// B1 and B2 as the actuator slides from pair 1 towards pair 2.
inline std::vector<ProfileRow> two_qubit_profile(const std::vector<double>& displacements_nm,
                                                 const scenes::TwoQubitLayout& layout = {},
                                                 const PhysicalConstants& c = {}) {
  std::vector<ProfileRow> rows;
  rows.reserve(displacements_nm.size());
  for (double d : displacements_nm) {
    const SceneGeometry scene = scenes::two_qubit(d, layout);
    rows.push_back({d, pair_coupling_B(scene.actuator, scene.pairs[0], c),
                    pair_coupling_B(scene.actuator, scene.pairs[1], c)});
  }
  return rows;
}

/// Histogram of |coupling| with fixed-width bins starting at zero.
struct Histogram {
  double bin_width_khz = 0.5;
  std::vector<std::uint64_t> counts;

  void add(double value_khz) {
    const auto bin = static_cast<std::size_t>(std::abs(value_khz) / bin_width_khz);
    if (bin >= counts.size()) counts.resize(bin + 1, 0);
    ++counts[bin];
  }

  void merge(const Histogram& other) {
    if (other.counts.size() > counts.size()) counts.resize(other.counts.size(), 0);
    for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
  }

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }

  std::vector<double> probability_mass() const {
    std::vector<double> mass(counts.size(), 0.0);
    const double n = static_cast<double>(total());
    if (n > 0)
      for (std::size_t i = 0; i < counts.size(); ++i) mass[i] = counts[i] / n;
    return mass;
  }

  std::size_t nonempty_bins() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                  [](auto c) { return c > 0; }));
  }

  double bin_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * bin_width_khz; }

  double mode_center() const {
    if (counts.empty()) return 0.0;
    const auto it = std::max_element(counts.begin(), counts.end());
    return bin_center(static_cast<std::size_t>(it - counts.begin()));
  }
};

/// Sampling box for the |A|, |B|, |B'| distributions. The actuator sits at
/// height h above the target midpoint and horizontal offset d at azimuth psi;
/// the neighbouring pair sits one lattice spacing away along +x.
struct CouplingMapRequest {
  double h_min_nm = 1.2;
  double h_max_nm = 1.5;
  int h_steps = 7;
  double d_max_nm = 0.4;
  int d_steps = 5;
  int azimuth_steps = 8;
  int orientation_samples = 1000;
  double neighbor_distance_nm = 2.0;
  double bin_width_khz = 0.5;
  /// |B| at or above this value is the "common" regime where B' is compared to B.
  double b_regime_khz = 6.0;
  std::uint64_t seed = 1;
  /// When set, the target pair is held at this orientation (no sampling of it).
  std::optional<SphericalPlacement> fixed_orientation;

  void validate() const {
    if (!(h_min_nm > 0.0) || h_max_nm < h_min_nm || h_steps < 1)
      throw DomainError("coupling map: empty or invalid h range");
    if (d_max_nm < 0.0 || d_steps < 1 || azimuth_steps < 1)
      throw DomainError("coupling map: empty or invalid d range");
    if (orientation_samples < 0 || (orientation_samples == 0 && !fixed_orientation))
      throw DomainError("coupling map: no orientations to sample");
    if (!(bin_width_khz > 0.0)) throw DomainError("coupling map: bin width must be positive");
    if (!(neighbor_distance_nm > 0.0)) throw DomainError("coupling map: neighbor distance must be positive");
  }
};

struct CouplingMaps {
  Histogram abs_A;
  Histogram abs_B;
  Histogram abs_B_prime;
  double max_abs_B_prime_khz = 0.0;
  /// max |B'|/|B| over samples with |B| >= b_regime_khz (0 if none).
  double max_ratio_in_regime = 0.0;
  std::uint64_t regime_samples = 0;
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline SphericalPlacement random_orientation(std::mt19937_64& rng, double r_nm) {
  const double cos_theta = 2.0 * unit_uniform(rng) - 1.0;
  const double phi = 2.0 * kPi * unit_uniform(rng);
  return {r_nm, std::acos(std::clamp(cos_theta, -1.0, 1.0)), phi};
}

inline double grid_point(double lo, double hi, int steps, int i) {
  return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
}

}  // namespace detail

/// Orientation-averaged coupling histograms over the actuator box. Each grid
/// point draws from its own stream seeded by (seed, grid index), so the result
/// does not depend on evaluation order.
inline CouplingMaps coupling_maps(const CouplingMapRequest& req, const PhysicalConstants& c = {}) {
  req.validate();
  CouplingMaps out;
  out.abs_A.bin_width_khz = out.abs_B.bin_width_khz = out.abs_B_prime.bin_width_khz =
      req.bin_width_khz;
  const int samples = req.fixed_orientation ? std::max(1, req.orientation_samples)
                                            : req.orientation_samples;
  std::uint64_t grid_index = 0;
  for (int ih = 0; ih < req.h_steps; ++ih) {
    const double h = detail::grid_point(req.h_min_nm, req.h_max_nm, req.h_steps, ih);
    for (int id = 0; id < req.d_steps; ++id) {
      const double d = detail::grid_point(0.0, req.d_max_nm, req.d_steps, id);
      const int azimuths = d == 0.0 ? 1 : req.azimuth_steps;
      for (int ia = 0; ia < azimuths; ++ia, ++grid_index) {
        const double psi = 2.0 * kPi * ia / req.azimuth_steps;
        const Vec3 actuator(d * std::cos(psi), d * std::sin(psi), h);
        std::seed_seq seq{static_cast<std::uint32_t>(req.seed), static_cast<std::uint32_t>(req.seed >> 32),
                          static_cast<std::uint32_t>(grid_index)};
        std::mt19937_64 rng(seq);
        for (int s = 0; s < samples; ++s) {
          const SphericalPlacement target_axis =
              req.fixed_orientation ? *req.fixed_orientation
                                    : detail::random_orientation(rng, kWaterProtonSeparationNm);
          const SphericalPlacement neighbor_axis =
              detail::random_orientation(rng, kWaterProtonSeparationNm);
          const double a = coupling_A(target_axis, c);
          const double b = pair_coupling_B(actuator, {Vec3::Zero(), target_axis}, c);
          const double bp = pair_coupling_B(
              actuator, {Vec3(req.neighbor_distance_nm, 0.0, 0.0), neighbor_axis}, c);
          out.abs_A.add(a);
          out.abs_B.add(b);
          out.abs_B_prime.add(bp);
          out.max_abs_B_prime_khz = std::max(out.max_abs_B_prime_khz, std::abs(bp));
          if (std::abs(b) >= req.b_regime_khz) {
            ++out.regime_samples;
            out.max_ratio_in_regime = std::max(out.max_ratio_in_regime, std::abs(bp) / std::abs(b));
          }
        }
      }
    }
  }
  return out;
}

}  // namespace nvdfq
