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

namespace nvdfq {

/// Physical constants and field settings. Frequencies are ordinary (not
/// angular) and expressed in kHz throughout the library.
struct PhysicalConstants {
  double zero_field_splitting_khz = 2.87e6;
  double static_field_gauss = 500.0;
  double gyromagnetic_ratio_electron = 1.76085963023e11;  // |gamma_e|, rad s^-1 T^-1
  double gyromagnetic_ratio_proton = 2.6752218744e8;      // rad s^-1 T^-1
  double vacuum_permeability_factor = 1e-7;               // mu0 / 4pi, SI
  double reduced_planck = 1.054571817e-34;                // J s

  double static_field_tesla() const { return static_field_gauss * 1e-4; }

  /// omega_e = gamma_e * B0, as an ordinary frequency in kHz.
  double electron_zeeman_khz() const {
    return gyromagnetic_ratio_electron * static_field_tesla() / (2.0 * kPi) * 1e-3;
  }

  /// omega_i = gamma_p * B0, as an ordinary frequency in kHz.
  double nuclear_zeeman_khz() const {
    return gyromagnetic_ratio_proton * static_field_tesla() / (2.0 * kPi) * 1e-3;
  }

  void validate() const {
    if (!(zero_field_splitting_khz > 0.0) || !(gyromagnetic_ratio_electron > 0.0) ||
        !(gyromagnetic_ratio_proton > 0.0) || !(vacuum_permeability_factor > 0.0) ||
        !(reduced_planck > 0.0) || !(static_field_gauss >= 0.0))
      throw DomainError("physical constants must be positive magnitudes");
  }
};

}  // namespace nvdfq
