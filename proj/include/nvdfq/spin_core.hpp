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
#include "nvdfq/geometry.hpp"

#include <array>
#include <numeric>
#include <string>
#include <vector>

namespace nvdfq {

struct SpinMatrices {
  Matrix x;
  Matrix y;
  Matrix z;

  const Matrix& operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

/// Angular-momentum matrices in the |m = S, S-1, ..., -S> basis.
/// Only spin 1/2 (nuclei) and spin 1 (NV electron) are supported.
inline SpinMatrices spin_operators(double spin) {
  if (spin != 0.5 && spin != 1.0) throw DomainError("unsupported spin magnitude");
  const auto dim = static_cast<Eigen::Index>(std::lround(2.0 * spin + 1.0));
  Matrix plus = Matrix::Zero(dim, dim);
  Matrix z = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double m = spin - static_cast<double>(k);
    z(k, k) = m;
    // <m+1| S+ |m> sits one row above column k.
    if (k > 0) plus(k - 1, k) = std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
  }
  const Matrix minus = plus.adjoint();
  return {0.5 * (plus + minus), Complex(0.0, -0.5) * (plus - minus), z};
}

/// Ordered tensor-product layout. Slot 0 is the actuator when one is present.
struct HilbertSpaceLayout {
  std::vector<int> factor_dims;
  std::vector<std::string> labels;

  HilbertSpaceLayout() = default;
  HilbertSpaceLayout(std::vector<int> dims, std::vector<std::string> names)
      : factor_dims(std::move(dims)), labels(std::move(names)) {
    validate();
  }

  Eigen::Index total_dim() const {
    return std::accumulate(factor_dims.begin(), factor_dims.end(), Eigen::Index{1},
                           [](Eigen::Index a, int b) { return a * b; });
  }

  std::size_t slots() const { return factor_dims.size(); }

  void validate() const {
    if (factor_dims.empty()) throw DomainError("layout has no factors");
    if (labels.size() != factor_dims.size()) throw DomainError("layout labels/dims mismatch");
    for (int d : factor_dims)
      if (d < 1) throw DomainError("layout factor dimension must be positive");
  }

  /// Actuator (dim 2 or 3) followed by P,Q spin-1/2 slots for each pair.
  static HilbertSpaceLayout actuator_and_pairs(int actuator_dim, std::size_t pair_count) {
    if (actuator_dim != 2 && actuator_dim != 3)
      throw DomainError("actuator dimension must be 2 or 3");
    std::vector<int> dims{actuator_dim};
    std::vector<std::string> names{"actuator"};
    for (std::size_t m = 0; m < pair_count; ++m) {
      dims.insert(dims.end(), {2, 2});
      names.push_back("pair-" + std::to_string(m + 1) + "-P");
      names.push_back("pair-" + std::to_string(m + 1) + "-Q");
    }
    return {dims, names};
  }

  static HilbertSpaceLayout pairs_only(std::size_t pair_count) {
    std::vector<int> dims;
    std::vector<std::string> names;
    for (std::size_t m = 0; m < pair_count; ++m) {
      dims.insert(dims.end(), {2, 2});
      names.push_back("pair-" + std::to_string(m + 1) + "-P");
      names.push_back("pair-" + std::to_string(m + 1) + "-Q");
    }
    return {dims, names};
  }
};

/// Kronecker embedding of `op` into `slot`, identities elsewhere.
inline Matrix embed(const Matrix& op, std::size_t slot, const HilbertSpaceLayout& layout) {
  if (slot >= layout.slots()) throw DomainError("embed: slot out of range");
  if (op.rows() != layout.factor_dims[slot] || op.cols() != layout.factor_dims[slot])
    throw DomainError("embed: operator dimension does not match the slot");
  Eigen::Index before = 1, after = 1;
  for (std::size_t s = 0; s < slot; ++s) before *= layout.factor_dims[s];
  for (std::size_t s = slot + 1; s < layout.slots(); ++s) after *= layout.factor_dims[s];
  return linalg::kron(linalg::kron(linalg::identity(before), op), linalg::identity(after));
}

enum class Frame { lab, electron_rotating };

struct HamiltonianTerm {
  Matrix matrix;
  std::string label;
  Frame frame = Frame::lab;
  HilbertSpaceLayout layout;

  void validate() const {
    if (matrix.rows() != layout.total_dim() || matrix.cols() != layout.total_dim())
      throw DomainError("Hamiltonian '" + label + "' does not match its layout");
    linalg::require_hermitian(matrix, label.c_str());
  }
};

/// Which non-secular terms survive.
///   none                  full tensors
///   electron              only S_z-diagonal actuator couplings (large D)
///   electron_and_nuclear  additionally only terms conserving each pair's I_z
enum class Secularity { none, electron, electron_and_nuclear };

/// H_NV = D S_z^2 + omega_e S_z in the |+1>, |0>, |-1> basis (kHz).
inline HamiltonianTerm build_h_nv(const PhysicalConstants& c) {
  c.validate();
  const SpinMatrices s = spin_operators(1.0);
  HamiltonianTerm term{c.zero_field_splitting_khz * s.z * s.z + c.electron_zeeman_khz() * s.z,
                       "H_NV", Frame::lab, HilbertSpaceLayout({3}, {"actuator"})};
  term.validate();
  return term;
}

namespace detail {

/// Drops matrix elements between product states of different total I_z
/// within each pair. `first_pair_slot` is the slot index of pair 1's P spin.
inline Matrix truncate_nuclear(const Matrix& h, const HilbertSpaceLayout& layout,
                               std::size_t first_pair_slot) {
  const Eigen::Index n = layout.total_dim();
  const std::size_t pairs = (layout.slots() - first_pair_slot) / 2;
  auto pair_m = [&](Eigen::Index index, std::size_t pair) {
    // Decode the digit of each pair spin; digit 0 is spin up.
    Eigen::Index stride = 1;
    for (std::size_t s = layout.slots(); s-- > first_pair_slot + 2 * pair + 2;) stride *= layout.factor_dims[s];
    const Eigen::Index q = (index / stride) % 2;
    const Eigen::Index p = (index / (stride * 2)) % 2;
    return static_cast<int>(2 - 2 * (p + q));  // twice the total m
  };
  Matrix out = h;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (std::size_t m = 0; m < pairs; ++m)
        if (pair_m(a, m) != pair_m(b, m)) {
          out(a, b) = 0.0;
          break;
        }
  return out;
}

inline Matrix pair_block(const Mat3& dipolar, double zeeman_khz) {
  const SpinMatrices i = spin_operators(0.5);
  const Matrix id = linalg::identity(2);
  Matrix h = zeeman_khz * (linalg::kron(i.z, id) + linalg::kron(id, i.z));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) h += dipolar(a, b) * linalg::kron(i[a], i[b]);
  return h;
}

}  // namespace detail

/// Single-pair Hamiltonian omega_i (I_z^p + I_z^q) + I^p . D . I^q over |up,down> products.
inline Matrix pair_hamiltonian(const Mat3& dipolar_khz, double zeeman_khz) {
  return detail::pair_block(dipolar_khz, zeeman_khz);
}

/// Sum over pairs of Zeeman and intra-pair dipolar terms on a pairs-only layout.
/// Couplings between different pairs are omitted.
inline HamiltonianTerm build_h_pairs(const SceneGeometry& geometry, const PhysicalConstants& c,
                                     Secularity secularity = Secularity::none) {
  geometry.validate();
  c.validate();
  const auto layout = HilbertSpaceLayout::pairs_only(geometry.pairs.size());
  const SpinMatrices i = spin_operators(0.5);
  const double zeeman = c.nuclear_zeeman_khz();
  Matrix h = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (std::size_t m = 0; m < geometry.pairs.size(); ++m) {
    const std::size_t ps = 2 * m, qs = 2 * m + 1;
    const Mat3 d = proton_proton_tensor(geometry.pairs[m], c);
    h += zeeman * (embed(i.z, ps, layout) + embed(i.z, qs, layout));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        h += d(a, b) * embed(i[a], ps, layout) * embed(i[b], qs, layout);
  }
  if (secularity == Secularity::electron_and_nuclear) h = detail::truncate_nuclear(h, layout, 0);
  HamiltonianTerm term{h, "H_pairs", Frame::lab, layout};
  term.validate();
  return term;
}

/// Actuator (spin-1) to nucleus couplings S . D^p . I^p + S . D^q . I^q over
/// [actuator(3), pairs...]. `Secularity::electron` keeps only the
/// S_z (D_zx I_x + D_zy I_y + D_zz I_z) terms.
inline HamiltonianTerm build_h_nv_pairs(const SceneGeometry& geometry, const PhysicalConstants& c,
                                        Secularity secularity) {
  geometry.validate();
  c.validate();
  const auto layout = HilbertSpaceLayout::actuator_and_pairs(3, geometry.pairs.size());
  const SpinMatrices s = spin_operators(1.0);
  const SpinMatrices i = spin_operators(0.5);
  Matrix h = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (std::size_t m = 0; m < geometry.pairs.size(); ++m) {
    const auto& pair = geometry.pairs[m];
    const std::array<std::pair<Vec3, std::size_t>, 2> spins{
        std::pair{pair.p(), 1 + 2 * m}, std::pair{pair.q(), 2 + 2 * m}};
    for (const auto& [position, slot] : spins) {
      const Mat3 d = actuator_nucleus_tensor(geometry.actuator, position, c);
      for (int a = 0; a < 3; ++a) {
        if (secularity != Secularity::none && a != 2) continue;
        for (int b = 0; b < 3; ++b) {
          if (secularity == Secularity::electron_and_nuclear && b != 2) continue;
          h += d(a, b) * embed(s[a], 0, layout) * embed(i[b], slot, layout);
        }
      }
    }
  }
  HamiltonianTerm term{h, "H_NV-pairs", Frame::lab, layout};
  term.validate();
  return term;
}

inline HamiltonianTerm build_h_nv_pairs_secular(const SceneGeometry& geometry,
                                                const PhysicalConstants& c) {
  return build_h_nv_pairs(geometry, c, Secularity::electron);
}

/// H_0 = H_NV + H_pairs + H_NV-pairs over [actuator(3), pairs...], lab frame.
inline HamiltonianTerm build_total_hamiltonian(const SceneGeometry& geometry,
                                               const PhysicalConstants& c,
                                               Secularity secularity = Secularity::none) {
  const auto layout = HilbertSpaceLayout::actuator_and_pairs(3, geometry.pairs.size());
  const Matrix nv = build_h_nv(c).matrix;
  const Matrix pairs = build_h_pairs(geometry, c, secularity).matrix;
  Matrix h = linalg::kron(nv, linalg::identity(pairs.rows())) +
             linalg::kron(linalg::identity(3), pairs) +
             build_h_nv_pairs(geometry, c, secularity).matrix;
  HamiltonianTerm term{h, "H_0", Frame::lab, layout};
  term.validate();
  return term;
}

}  // namespace nvdfq
