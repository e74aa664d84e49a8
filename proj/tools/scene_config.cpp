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
#include "scene_config.hpp"

#include <cmath>
#include <functional>

namespace nvdfq::cli {

namespace {

std::string where(const std::string& source, const YAML::Node& node) {
  const auto m = node.Mark();
  if (m.line < 0) return source;
  return source + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) throw ParseError(where(source_, node) + ": " + what + " must be a mapping");
  }

  /// Rejects keys outside `allowed`, pointing at the offending key.
  void strict(const YAML::Node& node, const std::string& what, std::initializer_list<const char*> allowed) const {
    require_map(node, what);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = node.begin(); it != node.end(); ++it) {
      const auto key = it->first.as<std::string>();
      if (!ok.count(key)) throw ParseError(where(source_, it->first) + ": unknown key '" + key + "' in " + what);
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) throw ParseError(where(source_, node) + ": '" + key + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      throw ParseError(where(source_, node) + ": bad value for '" + key + "': " + node.Scalar());
    }
  }

  double number(const YAML::Node& node, const std::string& key) const {
    const double v = scalar<double>(node, key);
    if (!std::isfinite(v)) throw ParseError(where(source_, node) + ": '" + key + "' must be finite");
    return v;
  }

  std::size_t count(const YAML::Node& node, const std::string& key) const {
    const long long v = scalar<long long>(node, key);
    if (v < 0) throw ParseError(where(source_, node) + ": '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
  }

  double angle(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) throw ParseError(where(source_, node) + ": '" + key + "' must be a scalar");
    try {
      return parse_angle(node.Scalar());
    } catch (const ParseError& e) {
      throw ParseError(where(source_, node) + ": " + e.what());
    }
  }

  Vec3 vec3(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence() || node.size() != 3)
      throw ParseError(where(source_, node) + ": '" + key + "' must be a list of three numbers");
    return {number(node[0], key), number(node[1], key), number(node[2], key)};
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence() || node.size() == 0)
      throw ParseError(where(source_, node) + ": '" + key + "' must be a non-empty list");
    std::vector<double> out;
    for (const auto& v : node) out.push_back(number(v, key));
    return out;
  }

  std::string choice(const YAML::Node& node, const std::string& key, std::initializer_list<const char*> options) const {
    const auto v = scalar<std::string>(node, key);
    for (const char* o : options)
      if (v == o) return v;
    throw ParseError(where(source_, node) + ": unsupported value '" + v + "' for '" + key + "'");
  }

  SphericalPlacement placement(const YAML::Node& node, const std::string& what) const {
    strict(node, what, {"r_nm", "theta", "phi"});
    SphericalPlacement p;
    if (!node["r_nm"] || !node["theta"]) throw ParseError(where(source_, node) + ": " + what + " needs r_nm and theta");
    p.r_nm = number(node["r_nm"], "r_nm");
    p.theta = angle(node["theta"], "theta");
    if (node["phi"]) p.phi = angle(node["phi"], "phi");
    return p;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

void read_constants(const Reader& r, const YAML::Node& n, PhysicalConstants& c) {
  r.strict(n, "constants", {"zero_field_splitting_khz", "field_gauss"});
  if (n["zero_field_splitting_khz"]) c.zero_field_splitting_khz = r.number(n["zero_field_splitting_khz"], "zero_field_splitting_khz");
  if (n["field_gauss"]) c.static_field_gauss = r.number(n["field_gauss"], "field_gauss");
}

void read_scene(const Reader& r, const YAML::Node& n, SceneSpec& s) {
  r.strict(n, "scene", {"pairs", "actuator", "lattice_spacing_nm"});
  if (n["lattice_spacing_nm"]) s.lattice_spacing_nm = r.number(n["lattice_spacing_nm"], "lattice_spacing_nm");
  if (n["pairs"]) {
    const auto& pairs = n["pairs"];
    if (!pairs.IsSequence() || pairs.size() == 0) throw ParseError(where(r.source(), pairs) + ": 'pairs' must be a non-empty list");
    s.pairs.clear();
    for (const auto& p : pairs) {
      r.strict(p, "pair", {"r_nm", "theta", "phi", "midpoint_nm"});
      PairSpec spec;
      spec.axis.r_nm = p["r_nm"] ? r.number(p["r_nm"], "r_nm") : kWaterProtonSeparationNm;
      if (!p["theta"]) throw ParseError(where(r.source(), p) + ": pair needs theta");
      spec.axis.theta = r.angle(p["theta"], "theta");
      if (p["phi"]) spec.axis.phi = r.angle(p["phi"], "phi");
      if (p["midpoint_nm"]) spec.midpoint_nm = r.vec3(p["midpoint_nm"], "midpoint_nm");
      s.pairs.push_back(spec);
    }
  }
  if (n["actuator"]) {
    const auto& a = n["actuator"];
    r.strict(a, "actuator", {"position_nm", "to_p", "displacement_nm", "height_nm"});
    int forms = 0;
    if (a["position_nm"]) {
      s.actuator_position_nm = r.vec3(a["position_nm"], "position_nm");
      ++forms;
    }
    if (a["to_p"]) {
      s.actuator_to_p = r.placement(a["to_p"], "to_p");
      ++forms;
    }
    if (a["displacement_nm"]) {
      s.displacement_nm = r.number(a["displacement_nm"], "displacement_nm");
      ++forms;
    }
    if (a["height_nm"]) s.height_nm = r.number(a["height_nm"], "height_nm");
    if (forms != 1)
      throw ParseError(where(r.source(), a) + ": actuator needs exactly one of position_nm, to_p, displacement_nm");
  }
}

void read_couplings(const Reader& r, const YAML::Node& n, SceneConfig& cfg) {
  r.strict(n, "couplings", {"h_min_nm", "h_max_nm", "h_steps", "d_max_nm", "d_steps", "azimuth_steps",
                            "orientation_samples", "neighbor_distance_nm", "bin_width_khz", "b_regime_khz",
                            "fixed_orientation", "profile"});
  auto& m = cfg.maps;
  if (n["h_min_nm"]) m.h_min_nm = r.number(n["h_min_nm"], "h_min_nm");
  if (n["h_max_nm"]) m.h_max_nm = r.number(n["h_max_nm"], "h_max_nm");
  if (n["h_steps"]) m.h_steps = static_cast<int>(r.count(n["h_steps"], "h_steps"));
  if (n["d_max_nm"]) m.d_max_nm = r.number(n["d_max_nm"], "d_max_nm");
  if (n["d_steps"]) m.d_steps = static_cast<int>(r.count(n["d_steps"], "d_steps"));
  if (n["azimuth_steps"]) m.azimuth_steps = static_cast<int>(r.count(n["azimuth_steps"], "azimuth_steps"));
  if (n["orientation_samples"]) m.orientation_samples = static_cast<int>(r.count(n["orientation_samples"], "orientation_samples"));
  if (n["neighbor_distance_nm"]) m.neighbor_distance_nm = r.number(n["neighbor_distance_nm"], "neighbor_distance_nm");
  if (n["bin_width_khz"]) m.bin_width_khz = r.number(n["bin_width_khz"], "bin_width_khz");
  if (n["b_regime_khz"]) m.b_regime_khz = r.number(n["b_regime_khz"], "b_regime_khz");
  if (n["fixed_orientation"]) {
    const auto& f = n["fixed_orientation"];
    r.strict(f, "fixed_orientation", {"r_nm", "theta", "phi"});
    SphericalPlacement p{kWaterProtonSeparationNm, 0.0, 0.0};
    if (f["r_nm"]) p.r_nm = r.number(f["r_nm"], "r_nm");
    if (!f["theta"]) throw ParseError(where(r.source(), f) + ": fixed_orientation needs theta");
    p.theta = r.angle(f["theta"], "theta");
    if (f["phi"]) p.phi = r.angle(f["phi"], "phi");
    m.fixed_orientation = p;
  }
  if (n["profile"]) {
    const auto& p = n["profile"];
    r.strict(p, "profile", {"d_min_nm", "d_max_nm", "steps"});
    const double lo = p["d_min_nm"] ? r.number(p["d_min_nm"], "d_min_nm") : 0.0;
    const double hi = p["d_max_nm"] ? r.number(p["d_max_nm"], "d_max_nm") : 2.0;
    const std::size_t steps = p["steps"] ? r.count(p["steps"], "steps") : 41;
    if (steps < 1 || hi < lo) throw ParseError(where(r.source(), p) + ": empty profile range");
    cfg.profile_displacements_nm.clear();
    for (std::size_t i = 0; i < steps; ++i)
      cfg.profile_displacements_nm.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
}

void read_noise(const Reader& r, const YAML::Node& n, NoiseSpec& s) {
  r.strict(n, "noise", {"delta1", "jitter_khz"});
  if (n["delta1"]) s.delta1 = r.numbers(n["delta1"], "delta1");
  if (n["jitter_khz"]) s.jitter_khz = r.numbers(n["jitter_khz"], "jitter_khz");
}

void read_grape(const Reader& r, const YAML::Node& n, GrapeSpec& g) {
  r.strict(n, "grape", {"target", "pair", "segments", "segment_us", "restarts", "max_iters", "tol",
                        "amplitude_bound_khz", "initial_amplitude_khz", "target_fidelity", "min_fidelity",
                        "robust_delta1", "ensemble"});
  if (n["target"]) g.target = r.choice(n["target"], "target", {"swap", "cnot"});
  if (n["pair"]) g.pair = r.count(n["pair"], "pair");
  if (n["segments"]) g.segments = r.count(n["segments"], "segments");
  if (n["segment_us"]) g.segment_us = r.number(n["segment_us"], "segment_us");
  if (n["restarts"]) g.restarts = static_cast<int>(r.count(n["restarts"], "restarts"));
  if (n["max_iters"]) g.max_iters = static_cast<int>(r.count(n["max_iters"], "max_iters"));
  if (n["tol"]) g.tol = r.number(n["tol"], "tol");
  if (n["amplitude_bound_khz"]) g.amplitude_bound_khz = r.number(n["amplitude_bound_khz"], "amplitude_bound_khz");
  if (n["initial_amplitude_khz"]) g.initial_amplitude_khz = r.number(n["initial_amplitude_khz"], "initial_amplitude_khz");
  if (n["target_fidelity"]) g.target_fidelity = r.number(n["target_fidelity"], "target_fidelity");
  if (n["min_fidelity"]) g.min_fidelity = r.number(n["min_fidelity"], "min_fidelity");
  if (n["robust_delta1"]) g.robust_delta1 = r.number(n["robust_delta1"], "robust_delta1");
  if (n["ensemble"]) {
    const auto& e = n["ensemble"];
    if (!e.IsSequence()) throw ParseError(where(r.source(), e) + ": 'ensemble' must be a list");
    for (const auto& m : e) {
      r.strict(m, "ensemble member", {"delta1", "jitter_khz", "weight"});
      EnsembleMember member;
      if (m["delta1"]) member.delta1 = r.number(m["delta1"], "delta1");
      if (m["jitter_khz"]) member.jitter_khz = r.number(m["jitter_khz"], "jitter_khz");
      if (m["weight"]) member.weight = r.number(m["weight"], "weight");
      g.ensemble.push_back(member);
    }
  }
}

void read_protocol(const Reader& r, const YAML::Node& n, ProtocolSpec& p) {
  r.strict(n, "protocol", {"which", "pulse_file", "initial_state", "rf_rabi_khz", "rf_frequency_khz",
                           "rf_duration_us", "mw_rabi_khz"});
  if (n["which"]) p.which = r.choice(n["which"], "which", {"init", "readout", "rf"});
  if (n["pulse_file"]) p.pulse_file = r.scalar<std::string>(n["pulse_file"], "pulse_file");
  if (n["initial_state"])
    p.initial_state = r.choice(n["initial_state"], "initial_state", {"mixed", "s0", "t0", "t_plus", "t_minus"});
  if (n["rf_rabi_khz"]) p.rf_rabi_khz = r.number(n["rf_rabi_khz"], "rf_rabi_khz");
  if (n["rf_frequency_khz"]) p.rf_frequency_khz = r.number(n["rf_frequency_khz"], "rf_frequency_khz");
  if (n["rf_duration_us"]) p.rf_duration_us = r.number(n["rf_duration_us"], "rf_duration_us");
  if (n["mw_rabi_khz"]) p.mw_rabi_khz = r.number(n["mw_rabi_khz"], "mw_rabi_khz");
}

void read_schedule(const Reader& r, const YAML::Node& n, ScheduleSpec& s) {
  r.strict(n, "schedule", {"lattice", "qubits", "rows", "cols", "tip_speed_nm_per_us", "cnot_us", "swap_us",
                           "single_us", "restore_layout", "circuit_file"});
  if (n["lattice"]) s.lattice = r.choice(n["lattice"], "lattice", {"line", "grid", "scene"});
  if (n["qubits"]) s.qubits = r.count(n["qubits"], "qubits");
  if (n["rows"]) s.rows = r.count(n["rows"], "rows");
  if (n["cols"]) s.cols = r.count(n["cols"], "cols");
  if (n["tip_speed_nm_per_us"]) s.tip_speed_nm_per_us = r.number(n["tip_speed_nm_per_us"], "tip_speed_nm_per_us");
  if (n["cnot_us"]) s.cnot_us = r.number(n["cnot_us"], "cnot_us");
  if (n["swap_us"]) s.swap_us = r.number(n["swap_us"], "swap_us");
  if (n["single_us"]) s.single_us = r.number(n["single_us"], "single_us");
  if (n["restore_layout"]) s.restore_layout = r.scalar<bool>(n["restore_layout"], "restore_layout");
  if (n["circuit_file"]) s.circuit_file = r.scalar<std::string>(n["circuit_file"], "circuit_file");
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string t;
  for (char ch : text)
    if (ch != ' ' && ch != '\t') t += ch;
  double scale = 1.0;
  auto ends_with = [&t](const std::string& suffix) {
    return t.size() >= suffix.size() && t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with("pi")) {
    scale = kPi;
    t.resize(t.size() - 2);
    if (t.empty() || t == "+") t = "1";
    if (t == "-") t = "-1";
    if (!t.empty() && t.back() == '*') t.pop_back();
  } else if (ends_with("rad")) {
    t.resize(t.size() - 3);
  }
  try {
    return io::parse_double(t, "angle") * scale;
  } catch (const ParseError&) {
    throw ParseError("bad angle '" + text + "' (use e.g. 0.45pi, 1.2rad or a number in radians)");
  }
}

SceneConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                     ": " + e.msg);
  }
  SceneConfig cfg;
  if (root.IsNull()) return cfg;
  const Reader r(source);
  r.strict(root, "config", {"seed", "constants", "scene", "couplings", "noise", "grape", "protocol", "schedule"});
  if (root["seed"]) cfg.seed = r.scalar<std::uint64_t>(root["seed"], "seed");
  if (root["constants"]) read_constants(r, root["constants"], cfg.constants);
  if (root["scene"]) read_scene(r, root["scene"], cfg.scene);
  if (root["couplings"]) read_couplings(r, root["couplings"], cfg);
  if (root["noise"]) read_noise(r, root["noise"], cfg.noise);
  if (root["grape"]) read_grape(r, root["grape"], cfg.grape);
  if (root["protocol"]) read_protocol(r, root["protocol"], cfg.protocol);
  if (root["schedule"]) read_schedule(r, root["schedule"], cfg.schedule);
  return cfg;
}

SceneConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError& e) {
    throw ParseError(e.what());
  }
  SceneConfig cfg = parse_config(text, path.string());
  cfg.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return cfg;
}

SceneGeometry SceneSpec::build() const {
  std::vector<PairSpec> ps = pairs;
  if (ps.empty()) {
    // Default: the first SWAP case (A = -12.7 kHz, B = -6.0 kHz).
    return scenes::swap_case_one();
  }
  SceneGeometry scene;
  scene.lattice_spacing_nm = lattice_spacing_nm;
  if (actuator_to_p) {
    if (ps.size() != 1 || ps[0].midpoint_nm)
      throw GeometryError("actuator.to_p places a single pair relative to the actuator; drop midpoint_nm");
    scene = scenes::single_pair(*actuator_to_p, ps[0].axis);
    scene.lattice_spacing_nm = lattice_spacing_nm;
    scene.validate();
    return scene;
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Vec3 mid = ps[i].midpoint_nm.value_or(Vec3(lattice_spacing_nm * static_cast<double>(i), 0.0, 0.0));
    scene.pairs.push_back({mid, ps[i].axis});
  }
  if (actuator_position_nm)
    scene.actuator = *actuator_position_nm;
  else
    scene.actuator = scene.pairs[0].midpoint + Vec3(displacement_nm.value_or(0.0), 0.0, height_nm);
  scene.validate();
  return scene;
}

}  // namespace nvdfq::cli
