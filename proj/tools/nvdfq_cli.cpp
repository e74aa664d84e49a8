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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

namespace {

using namespace nvdfq;
using nvdfq::cli::SceneConfig;
using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kFailure = 1, kParse = 2, kGeometry = 3, kOptimizer = 4, kMissing = 5 };

class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizerShortfall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  unsigned threads = 1;
};

SceneConfig load(const Globals& g) {
  SceneConfig cfg = g.config.empty() ? SceneConfig{} : cli::load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

std::filesystem::path resolve(const SceneConfig& cfg, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || std::filesystem::exists(path) ? path : cfg.base_dir / path;
}

void write_json(const std::filesystem::path& path, const Json& j) { io::write_atomic(path, j.dump(2) + "\n"); }

Json couplings_json(const CouplingSet& c) { return Json{{"A_khz", c.A_khz}, {"B_khz", c.B_khz}}; }

// ------------------------------------------------------------------ couplings

scenes::TwoQubitLayout profile_layout(const SceneGeometry& scene, const SceneConfig& cfg) {
  scenes::TwoQubitLayout layout;
  if (scene.pairs.size() >= 2 && !cfg.scene.actuator_to_p) {
    layout.axis1 = scene.pairs[0].axis;
    layout.axis2 = scene.pairs[1].axis;
    layout.spacing_nm = (scene.pairs[1].midpoint - scene.pairs[0].midpoint).norm();
    layout.height_nm = cfg.scene.height_nm;
  }
  return layout;
}

int cmd_couplings(const Globals& g) {
  const SceneConfig cfg = load(g);
  const SceneGeometry scene = cfg.scene.build();
  Json pairs = Json::array();
  for (std::size_t i = 0; i < scene.pairs.size(); ++i) {
    const auto c = pair_couplings(scene, i, cfg.constants);
    std::printf("pair %zu: A = %.4f kHz, B = %.4f kHz\n", i, c.A_khz, c.B_khz);
    Json entry = couplings_json(c);
    entry["pair"] = i;
    pairs.push_back(entry);
  }
  CouplingMapRequest req = cfg.maps;
  req.seed = cfg.seed;
  const CouplingMaps maps = coupling_maps(req, cfg.constants);
  std::vector<double> ds = cfg.profile_displacements_nm;
  if (ds.empty())
    for (int i = 0; i <= 40; ++i) ds.push_back(0.05 * i);
  const auto profile = two_qubit_profile(ds, profile_layout(scene, cfg), cfg.constants);

  const std::filesystem::path out(g.out);
  io::write_atomic(out / "map_A.csv", io::histogram_csv(maps.abs_A));
  io::write_atomic(out / "map_B.csv", io::histogram_csv(maps.abs_B));
  io::write_atomic(out / "map_B_prime.csv", io::histogram_csv(maps.abs_B_prime));
  io::write_atomic(out / "profile_B1_B2.csv", io::profile_csv(profile));
  Json summary{{"seed", cfg.seed},
               {"pairs", pairs},
               {"samples", maps.abs_B.total()},
               {"max_abs_B_prime_khz", maps.max_abs_B_prime_khz},
               {"b_regime_khz", req.b_regime_khz},
               {"regime_samples", maps.regime_samples},
               {"max_B_prime_over_B_in_regime", maps.max_ratio_in_regime}};
  write_json(out / "couplings.json", summary);
  std::printf("max |B'| = %.4f kHz; max |B'|/|B| for |B| >= %.1f kHz: %.4f (%llu samples)\n",
              maps.max_abs_B_prime_khz, req.b_regime_khz, maps.max_ratio_in_regime,
              static_cast<unsigned long long>(maps.regime_samples));
  return kOk;
}

// ---------------------------------------------------------------------- grape

struct GrapeSetup {
  GrapeProblem problem;
  std::vector<CouplingSet> couplings;
};

GrapeSetup grape_setup(const SceneConfig& cfg, const std::string& target) {
  GrapeSetup s;
  const auto& gs = cfg.grape;
  if (target == "swap") {
    const SceneGeometry scene = cfg.scene.build();
    if (gs.pair >= scene.pairs.size()) throw GeometryError("grape.pair is outside the scene");
    s.couplings = {pair_couplings(scene, gs.pair, cfg.constants)};
    s.problem = swap_problem(s.couplings[0], gs.segments, gs.segment_us);
  } else {
    const SceneGeometry scene = cfg.scene.pairs.empty() ? scenes::two_qubit(0.85) : cfg.scene.build();
    if (scene.pairs.size() < 2) throw GeometryError("a CNOT needs a scene with two pairs");
    s.couplings = {pair_couplings(scene, 0, cfg.constants), pair_couplings(scene, 1, cfg.constants)};
    s.problem = cnot_problem(s.couplings[0], s.couplings[1], gs.segments, gs.segment_us);
  }
  s.problem.amplitude_bound_khz = gs.amplitude_bound_khz;
  if (gs.robust_delta1) s.problem.ensemble = delta1_ensemble(*gs.robust_delta1);
  if (!gs.ensemble.empty()) s.problem.ensemble = gs.ensemble;
  s.problem.validate();
  return s;
}

std::string pick_target(const std::string& positional, const SceneConfig& cfg) {
  const std::string t = positional.empty() ? cfg.grape.target : positional;
  if (t != "swap" && t != "cnot") throw ParseError("target must be swap or cnot, got '" + t + "'");
  return t;
}

GrapeResult run_grape(const GrapeProblem& problem, const SceneConfig& cfg, unsigned threads) {
  GrapeOptions opt;
  opt.restarts = cfg.grape.restarts;
  opt.max_iters = cfg.grape.max_iters;
  opt.gradient_tol = cfg.grape.tol;
  opt.target_fidelity = cfg.grape.target_fidelity;
  opt.initial_amplitude_khz = cfg.grape.initial_amplitude_khz;
  opt.threads = threads;
  return optimize(problem, cfg.seed, opt);
}

int cmd_grape(const Globals& g, const std::string& positional) {
  const SceneConfig cfg = load(g);
  const std::string target = pick_target(positional, cfg);
  const GrapeSetup setup = grape_setup(cfg, target);
  const GrapeResult res = run_grape(setup.problem, cfg, g.threads);
  const auto table = noise_sweep(setup.problem.system, res.sequence, setup.problem.target,
                                 setup.problem.subspace_isometry, cfg.noise.delta1, cfg.noise.jitter_khz, g.threads);
  double max_amp = 0.0;
  for (double a : res.amplitudes) max_amp = std::max(max_amp, std::abs(a));

  Json couplings = Json::array();
  for (const auto& c : setup.couplings) couplings.push_back(couplings_json(c));
  Json robustness = Json::array();
  for (const auto& p : table)
    robustness.push_back({{"delta1", p.delta1}, {"jitter_khz", p.jitter_khz}, {"fidelity", p.fidelity}});
  Json report{{"target", target},
              {"couplings", couplings},
              {"segments", setup.problem.segment_count()},
              {"segment_us", cfg.grape.segment_us},
              {"seed", cfg.seed},
              {"restarts", cfg.grape.restarts},
              {"best_restart", res.restart},
              {"status", to_string(res.status)},
              {"converged", res.converged},
              {"iterations", res.iterations},
              {"fidelity", res.fidelity},
              {"objective", res.objective},
              {"gradient_norm", res.gradient_norm},
              {"max_abs_amplitude_khz", max_amp},
              {"fidelity_trace", res.fidelity_trace},
              {"robustness", robustness}};
  const std::filesystem::path out(g.out);
  io::write_pulse_csv(out / (target + "_pulse.csv"), res.sequence);
  write_json(out / (target + "_result.json"), report);
  std::printf("%s: fidelity %.6f (restart %d, %s, %d iterations)\n", target.c_str(), res.fidelity, res.restart,
              to_string(res.status), res.iterations);
  if (res.fidelity < cfg.grape.min_fidelity)
    throw OptimizerShortfall("best fidelity " + std::to_string(res.fidelity) + " is below min_fidelity " +
                             std::to_string(cfg.grape.min_fidelity) + "; best-so-far pulse written");
  return kOk;
}

/// Pulse from --pulse / config, or a fresh SWAP synthesis when neither names one.
PulseSequence obtain_pulse(const SceneConfig& cfg, const std::string& flag, const std::string& target,
                           unsigned threads, bool& synthesized) {
  std::optional<std::string> name;
  if (!flag.empty())
    name = flag;
  else if (cfg.protocol.pulse_file)
    name = cfg.protocol.pulse_file;
  synthesized = !name;
  if (!name) return run_grape(grape_setup(cfg, target).problem, cfg, threads).sequence;
  const auto path = flag.empty() ? resolve(cfg, *name) : std::filesystem::path(*name);
  if (!std::filesystem::exists(path)) throw MissingArtifact("pulse file not found: " + path.string());
  return io::read_pulse_csv(path);
}

// ------------------------------------------------------------------- protocol

Matrix named_pair_state(const std::string& name) {
  const auto& b = LogicalBasis::get();
  if (name == "mixed") return linalg::identity(4) / 4.0;
  const Vector& v = name == "s0" ? b.s0 : name == "t0" ? b.t0 : name == "t_plus" ? b.t_plus : b.t_minus;
  return v * v.adjoint();
}

int cmd_protocol(const Globals& g, const std::string& positional, const std::string& pulse_flag, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  const SceneConfig cfg = load(g);
  const std::string which = positional.empty() ? cfg.protocol.which : positional;
  if (which != "init" && which != "readout" && which != "rf")
    throw ParseError("protocol must be init, readout or rf, got '" + which + "'");
  const SceneGeometry scene = cfg.scene.build();
  if (cfg.grape.pair >= scene.pairs.size()) throw GeometryError("grape.pair is outside the scene");
  const auto model = ActuatorPairModel::from_scene(scene, cfg.grape.pair, cfg.constants);
  const auto tr = rf_transition_frequencies(model.h_pair);

  Json report{{"protocol", which},
              {"couplings", couplings_json(model.couplings)},
              {"delta1_khz", tr.delta1_khz},
              {"delta2_khz", tr.delta2_khz}};
  Json warnings = Json::array();

  if (which == "rf") {
    RFPulse pulse = RFPulse::pi_pulse(cfg.protocol.rf_frequency_khz.value_or(tr.delta1_khz), cfg.protocol.rf_rabi_khz);
    if (cfg.protocol.rf_duration_us) pulse.duration_us = *cfg.protocol.rf_duration_us;
    pulse.validate();
    const auto levels = triplet_levels(model.h_pair);
    const auto& b = LogicalBasis::get();
    auto run = [&](const Vector& v) { return simulate_rf_pi(v * v.adjoint(), model.h_pair, pulse); };
    const Matrix from_plus = run(levels.t_plus);
    const Matrix from_minus = run(levels.t_minus);
    const Matrix from_s0 = run(b.s0);
    report["rf"] = {{"frequency_khz", pulse.frequency_khz},
                    {"rabi_khz", pulse.rabi_khz},
                    {"duration_us", pulse.duration_us}};
    report["transfer_t_plus_to_t0"] = population(from_plus, levels.t_zero);
    report["transfer_t_minus_to_t0"] = population(from_minus, levels.t_zero);
    report["singlet_change"] = std::abs(1.0 - population(from_s0, b.s0));
    for (auto& w : rf_warnings(model.h_pair, pulse)) warnings.push_back(w);
  } else {
    bool synthesized = false;
    const PulseSequence swap = obtain_pulse(cfg, pulse_flag, "swap", g.threads, synthesized);
    const Matrix iso = linalg::kron(linalg::identity(2), LogicalBasis::get().isometry);
    report["swap_source"] = synthesized ? "synthesized" : "file";
    report["swap_fidelity"] = gate_fidelity(sequence_unitary(model.control_system(), swap), swap_target(), iso);
    report["initial_state"] = cfg.protocol.initial_state;
    const Matrix rho0 = named_pair_state(cfg.protocol.initial_state);
    if (which == "init") {
      InitializationPlan plan = InitializationPlan::standard(model.h_pair, cfg.protocol.rf_rabi_khz);
      plan.mw_rabi_khz = cfg.protocol.mw_rabi_khz;
      const auto rep = run_initialization(rho0, plan, model, swap);
      Json blocks = Json::array();
      for (const auto& blk : rep.blocks)
        blocks.push_back({{"block", blk.name}, {"singlet_population", blk.singlet_population}});
      report["blocks"] = blocks;
      report["final_fidelity"] = rep.fidelity;
      for (const auto& w : rep.warnings) warnings.push_back(w);
      std::printf("init: <S0|rho|S0> = %.6f\n", rep.fidelity);
    } else {
      const auto dist = run_readout(rho0, model, swap, cfg.protocol.mw_rabi_khz);
      report["p_actuator_0"] = dist.p0;
      report["p_actuator_1"] = dist.p1;
      std::printf("readout: P(0) = %.6f, P(1) = %.6f\n", dist.p0, dist.p1);
    }
  }
  report["warnings"] = warnings;
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
  if (timing)
    report["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(std::filesystem::path(g.out) / ("protocol_" + which + ".json"), report);
  return kOk;
}

// ------------------------------------------------------------------- schedule

Matrix named_gate(const std::string& name, const Json& gate) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix u(2, 2);
  if (name == "h") {
    u << r, r, r, -r;
  } else if (name == "x") {
    u << 0, 1, 1, 0;
  } else if (name == "y") {
    u << 0, Complex(0, -1), Complex(0, 1), 0;
  } else if (name == "z") {
    u << 1, 0, 0, -1;
  } else if (name == "s") {
    u << 1, 0, 0, Complex(0, 1);
  } else if (name == "t") {
    u << 1, 0, 0, std::exp(Complex(0, kPi / 4));
  } else if (name == "rx" || name == "ry" || name == "rz") {
    if (!gate.contains("angle")) throw ParseError("gate '" + name + "' needs an angle");
    const double a = gate["angle"].is_string() ? cli::parse_angle(gate["angle"].get<std::string>())
                                               : gate["angle"].get<double>();
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    if (name == "rx") u << c, Complex(0, -s), Complex(0, -s), c;
    if (name == "ry") u << c, -s, s, c;
    if (name == "rz") u << std::exp(Complex(0, -a / 2)), 0, 0, std::exp(Complex(0, a / 2));
  } else if (name == "u") {
    const auto& m = gate.at("matrix");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const auto& e = m.at(i).at(j);
        u(i, j) = e.is_array() ? Complex(e.at(0).get<double>(), e.at(1).get<double>()) : Complex(e.get<double>(), 0);
      }
  } else {
    throw ParseError("unknown gate '" + name + "'");
  }
  return u;
}

std::size_t qubit_index(const Json& gate, const char* key) {
  if (!gate.contains(key)) throw ParseError(std::string("gate is missing '") + key + "'");
  const auto& v = gate[key];
  if (!v.is_number_integer()) throw ParseError(std::string("'") + key + "' must be an integer");
  const auto q = v.get<long long>();
  if (q < 0) throw GeometryError(std::string("negative qubit index in '") + key + "'");
  return static_cast<std::size_t>(q);
}

LogicalCircuit parse_circuit(const std::string& text, std::size_t lattice_size) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("circuit: ") + e.what());
  }
  LogicalCircuit circuit;
  circuit.qubit_count = lattice_size;
  const Json* gates = &doc;
  if (doc.is_object()) {
    if (doc.contains("qubits")) circuit.qubit_count = doc["qubits"].get<std::size_t>();
    if (!doc.contains("gates")) throw ParseError("circuit object needs 'gates'");
    gates = &doc["gates"];
  }
  if (!gates->is_array()) throw ParseError("circuit must be a list of gates");
  try {
    for (const auto& gate : *gates) {
      const auto name = gate.at("gate").get<std::string>();
      if (name == "cnot")
        circuit.cnot(qubit_index(gate, "control"), qubit_index(gate, "target"));
      else
        circuit.single(qubit_index(gate, "qubit"), named_gate(name, gate), name);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("circuit: ") + e.what());
  }
  return circuit;
}

int cmd_schedule(const Globals& g, const std::string& positional) {
  const SceneConfig cfg = load(g);
  const auto& s = cfg.schedule;
  QubitLattice lattice;
  if (s.lattice == "line")
    lattice = QubitLattice::line(s.qubits, cfg.scene.lattice_spacing_nm);
  else if (s.lattice == "grid")
    lattice = QubitLattice::grid(s.rows, s.cols, cfg.scene.lattice_spacing_nm);
  else
    lattice = QubitLattice::from_scene(cfg.scene.build());
  std::string file = positional;
  if (file.empty() && s.circuit_file) file = resolve(cfg, *s.circuit_file).string();
  if (file.empty()) throw ParseError("schedule needs a circuit file");
  if (!std::filesystem::exists(file)) throw MissingArtifact("circuit file not found: " + file);
  const LogicalCircuit circuit = parse_circuit(io::read_file(file), lattice.size());

  GateDurations durations;
  durations.cnot_us = s.cnot_us;
  durations.swap_us = s.swap_us;
  durations.single_us = s.single_us;
  CompileOptions options;
  options.tip_speed_nm_per_us = s.tip_speed_nm_per_us;
  options.restore_layout = s.restore_layout;
  const auto itinerary = compile(circuit, lattice, durations, options);
  const auto budget = time_budget(itinerary, s.tip_speed_nm_per_us);

  std::string lines;
  for (const auto& step : itinerary.steps) {
    Json j{{"step", step.step},
           {"kind", to_string(step.kind)},
           {"target", step.target},
           {"duration_us", step.duration_us},
           {"distance_nm", step.distance_nm}};
    lines += j.dump() + "\n";
  }
  const std::filesystem::path out(g.out);
  io::write_atomic(out / "itinerary.jsonl", lines);
  Json summary{{"qubits", lattice.size()},
               {"gates", circuit.gates.size()},
               {"operation_count", itinerary.operation_count},
               {"move_count", itinerary.move_count},
               {"gate_count", itinerary.gate_count},
               {"move_time_us", budget.move_time_us},
               {"gate_time_us", budget.gate_time_us},
               {"total_time_us", budget.total_time_us},
               {"move_to_gate_ratio", budget.move_to_gate_ratio},
               {"final_layout", itinerary.final_layout}};
  write_json(out / "schedule_summary.json", summary);
  std::printf("%zu operations (%zu moves, %zu gates); move/gate time %.4f\n", itinerary.operation_count,
              itinerary.move_count, itinerary.gate_count, budget.move_to_gate_ratio);
  return kOk;
}

// ---------------------------------------------------------------------- sweep

int cmd_sweep(const Globals& g, const std::string& positional, const std::string& pulse_flag) {
  const SceneConfig cfg = load(g);
  const std::string target = pick_target(positional, cfg);
  const GrapeSetup setup = grape_setup(cfg, target);
  bool synthesized = false;
  const PulseSequence seq = obtain_pulse(cfg, pulse_flag, target, g.threads, synthesized);
  if (seq.segments.size() != setup.problem.segment_count())
    std::fprintf(stderr, "note: pulse has %zu segments, config expects %zu\n", seq.segments.size(),
                 setup.problem.segment_count());
  const auto table = noise_sweep(setup.problem.system, seq, setup.problem.target, setup.problem.subspace_isometry,
                                 cfg.noise.delta1, cfg.noise.jitter_khz, g.threads);
  io::write_atomic(std::filesystem::path(g.out) / (target + "_fidelity.csv"), io::fidelity_table_csv(table));
  double worst = 1.0;
  for (const auto& p : table) worst = std::min(worst, p.fidelity);
  std::printf("%s sweep: %zu points, minimum fidelity %.6f\n", target.c_str(), table.size(), worst);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nvdfq: DF-qubit control through an NV actuator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Scene config (YAML)");
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  std::string target, which, circuit, pulse;
  bool timing = false;
  auto* couplings = app.add_subcommand("couplings", "Coupling strengths, maps and the B1/B2 profile");
  auto* grape = app.add_subcommand("grape", "Optimize a SWAP or CNOT pulse sequence");
  grape->add_option("target", target, "swap or cnot");
  auto* protocol = app.add_subcommand("protocol", "Initialization, readout or RF report");
  protocol->add_option("which", which, "init, readout or rf");
  protocol->add_option("--pulse", pulse, "SWAP pulse CSV");
  protocol->add_flag("--timing", timing, "Include wall-clock time in the report");
  auto* schedule = app.add_subcommand("schedule", "Compile a circuit into an actuator itinerary");
  schedule->add_option("circuit", circuit, "Circuit JSON file");
  auto* sweep = app.add_subcommand("sweep", "Fidelity table over delta1 and coupling jitter");
  sweep->add_option("target", target, "swap or cnot");
  sweep->add_option("--pulse", pulse, "Pulse CSV");
  for (auto* sub : {couplings, grape, protocol, schedule, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*couplings) return cmd_couplings(g);
    if (*grape) return cmd_grape(g, target);
    if (*protocol) return cmd_protocol(g, which, pulse, timing);
    if (*schedule) return cmd_schedule(g, circuit);
    if (*sweep) return cmd_sweep(g, target, pulse);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return kGeometry;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const OptimizerShortfall& e) {
    std::cerr << "optimizer: " << e.what() << "\n";
    return kOptimizer;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing: " << e.what() << "\n";
    return kMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
