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

#include "nvdfq/nvdfq.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nvdfq::cli {

struct PairSpec {
  SphericalPlacement axis{kWaterProtonSeparationNm, kPi / 2, 0.0};
  std::optional<Vec3> midpoint_nm;
};

struct SceneSpec {
  std::vector<PairSpec> pairs;
  double lattice_spacing_nm = 2.0;
  // Exactly one actuator placement form is used.
  std::optional<Vec3> actuator_position_nm;
  std::optional<SphericalPlacement> actuator_to_p;  // relative to pair 0's spin P
  std::optional<double> displacement_nm;            // along the lattice from pair 0
  double height_nm = 1.0;

  SceneGeometry build() const;
};

struct NoiseSpec {
  std::vector<double> delta1 = default_delta1_grid();
  std::vector<double> jitter_khz{0.0};
};

struct GrapeSpec {
  std::string target = "swap";
  std::size_t pair = 0;
  std::size_t segments = 100;
  double segment_us = 1.5;
  int restarts = 8;
  int max_iters = 3000;
  double tol = 1e-7;
  double amplitude_bound_khz = 20000.0;
  double initial_amplitude_khz = 100.0;
  std::optional<double> target_fidelity;
  double min_fidelity = 0.99;
  std::optional<double> robust_delta1;
  std::vector<EnsembleMember> ensemble;
};

struct ProtocolSpec {
  std::string which = "init";
  std::optional<std::string> pulse_file;
  std::string initial_state = "mixed";
  double rf_rabi_khz = 5.0;
  std::optional<double> rf_frequency_khz;
  std::optional<double> rf_duration_us;
  double mw_rabi_khz = 1000.0;
};

struct ScheduleSpec {
  std::string lattice = "line";  // line | grid | scene
  std::size_t qubits = 8;
  std::size_t rows = 1;
  std::size_t cols = 8;
  double tip_speed_nm_per_us = 0.23;
  double cnot_us = 500.0;
  double swap_us = 150.0;
  std::optional<double> single_us;
  bool restore_layout = false;
  std::optional<std::string> circuit_file;
};

struct SceneConfig {
  std::uint64_t seed = 1;
  PhysicalConstants constants;
  SceneSpec scene;
  CouplingMapRequest maps;
  std::vector<double> profile_displacements_nm;
  NoiseSpec noise;
  GrapeSpec grape;
  ProtocolSpec protocol;
  ScheduleSpec schedule;
  std::filesystem::path base_dir = ".";
};

/// Parses "0.45pi", "pi", "-0.2 pi", "1.2rad" or a bare number (radians).
double parse_angle(const std::string& text);

SceneConfig load_config(const std::filesystem::path& path);
SceneConfig parse_config(const std::string& text, const std::string& source = "config");

}  // namespace nvdfq::cli
