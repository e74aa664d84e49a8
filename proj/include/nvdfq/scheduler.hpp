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

#include "nvdfq/geometry.hpp"
#include "nvdfq/logical.hpp"
#include "nvdfq/protocols.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvdfq {

enum class GateKind { single, cnot };

struct LogicalGate {
  GateKind kind = GateKind::single;
  std::size_t q1 = 0;  // qubit, or control for a CNOT
  std::size_t q2 = 0;  // CNOT target
  Matrix unitary;      // 2x2 for single-qubit gates
  std::string label;
};

struct LogicalCircuit {
  std::size_t qubit_count = 0;
  std::vector<LogicalGate> gates;

  LogicalCircuit& single(std::size_t q, Matrix u, std::string label = "u") {
    gates.push_back({GateKind::single, q, q, std::move(u), std::move(label)});
    return *this;
  }
  LogicalCircuit& cnot(std::size_t control, std::size_t target) {
    gates.push_back({GateKind::cnot, control, target, Matrix(), "cnot"});
    return *this;
  }

  void validate() const {
    for (const auto& g : gates) {
      if (g.q1 >= qubit_count || g.q2 >= qubit_count)
        throw GeometryError("gate references qubit outside 0.." + std::to_string(qubit_count - 1));
      if (g.kind == GateKind::cnot && g.q1 == g.q2) throw GeometryError("CNOT control equals target");
      if (g.kind == GateKind::single && (g.unitary.rows() != 2 || !linalg::is_unitary(g.unitary, 1e-9)))
        throw DomainError("single-qubit gate must carry a 2x2 unitary");
    }
  }
};

/// DF qubits on a lattice; neighbours are qubits one lattice spacing apart.
struct QubitLattice {
  std::vector<Vec3> positions;
  double spacing_nm = 2.0;

  std::size_t size() const { return positions.size(); }

  static QubitLattice line(std::size_t n, double spacing_nm = 2.0) {
    QubitLattice l;
    l.spacing_nm = spacing_nm;
    for (std::size_t i = 0; i < n; ++i) l.positions.emplace_back(spacing_nm * static_cast<double>(i), 0.0, 0.0);
    return l;
  }

  static QubitLattice grid(std::size_t rows, std::size_t cols, double spacing_nm = 2.0) {
    QubitLattice l;
    l.spacing_nm = spacing_nm;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        l.positions.emplace_back(spacing_nm * static_cast<double>(c), spacing_nm * static_cast<double>(r), 0.0);
    return l;
  }

  static QubitLattice from_scene(const SceneGeometry& scene) {
    scene.validate();
    QubitLattice l;
    l.spacing_nm = scene.lattice_spacing_nm;
    for (const auto& p : scene.pairs) l.positions.push_back(p.midpoint);
    return l;
  }

  bool adjacent(std::size_t a, std::size_t b) const {
    return a != b && std::abs((positions[a] - positions[b]).norm() - spacing_nm) <= 0.01 * spacing_nm;
  }

  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(size());
    for (std::size_t a = 0; a < size(); ++a)
      for (std::size_t b = 0; b < size(); ++b)
        if (adjacent(a, b)) adj[a].push_back(b);
    return adj;
  }

  /// Shortest qubit path from a to b (inclusive), breadth first.
  std::vector<std::size_t> path(std::size_t a, std::size_t b) const {
    const auto adj = adjacency();
    std::vector<std::size_t> prev(size(), size());
    std::deque<std::size_t> queue{a};
    prev[a] = a;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      if (u == b) break;
      for (auto v : adj[u])
        if (prev[v] == size()) {
          prev[v] = u;
          queue.push_back(v);
        }
    }
    if (prev[b] == size()) throw GeometryError("qubits are not connected on the lattice");
    std::vector<std::size_t> out{b};
    while (out.back() != a) out.push_back(prev[out.back()]);
    std::reverse(out.begin(), out.end());
    return out;
  }

  void validate() const {
    if (positions.empty()) throw GeometryError("lattice has no qubits");
    if (!(spacing_nm > 0.0)) throw GeometryError("lattice spacing must be positive");
    for (std::size_t i = 1; i < size(); ++i) (void)path(0, i);
  }
};

/// Actuator parking site: above qubit `a` when a == b, otherwise the CNOT
/// position offset from `a` toward its neighbour `b`.
struct Site {
  std::size_t a = 0;
  std::size_t b = 0;
  bool top() const { return a == b; }
  auto operator<=>(const Site&) const = default;
};

inline std::string to_string(const Site& s) {
  return s.top() ? "q" + std::to_string(s.a) : "q" + std::to_string(s.a) + "-q" + std::to_string(s.b);
}

struct GateDurations {
  double cnot_us = 500.0;
  double swap_us = 150.0;
  /// Fixed single-qubit duration; when absent it is the total dwell time of
  /// the synthesized rotation for `single_qubit_couplings`.
  std::optional<double> single_us;
  CouplingSet single_qubit_couplings{-12.7, -6.0, std::nullopt};

  double single(const Matrix& u) const {
    if (single_us) return *single_us;
    double t = 0.0;
    for (const auto& s : synthesize_single_qubit(u, rotation_axes(single_qubit_couplings))) t += s.dwell_us;
    return t;
  }

  void validate() const {
    if (!(cnot_us > 0.0) || !(swap_us > 0.0)) throw DomainError("gate durations must be positive");
    if (single_us && !(*single_us >= 0.0)) throw DomainError("single-qubit duration must be non-negative");
  }
};

struct CompileOptions {
  double tip_speed_nm_per_us = 0.23;
  double cnot_offset_nm = 0.85;
  double tip_height_nm = 1.0;
  std::size_t start_qubit = 0;
  /// Undo routing SWAPs after each long-range CNOT instead of tracking the
  /// logical-to-physical permutation.
  bool restore_layout = false;
  /// Bound c in operation_count <= c n N, checked on every compile.
  double operation_constant = 8.0;
};

enum class ItineraryKind { move, single, cnot, swap };

inline const char* to_string(ItineraryKind k) {
  switch (k) {
    case ItineraryKind::move: return "move";
    case ItineraryKind::single: return "single";
    case ItineraryKind::cnot: return "cnot";
    case ItineraryKind::swap: return "swap";
  }
  return "unknown";
}

struct ItineraryStep {
  std::size_t step = 0;
  ItineraryKind kind = ItineraryKind::move;
  std::string target;
  double duration_us = 0.0;
  double distance_nm = 0.0;
  Site site;
};

struct ActuatorItinerary {
  std::vector<ItineraryStep> steps;
  double move_time_us = 0.0;
  double gate_time_us = 0.0;
  std::size_t move_count = 0;
  std::size_t gate_count = 0;
  std::size_t operation_count = 0;
  std::vector<std::size_t> final_layout;  // logical qubit -> physical qubit
};

struct TimeBudget {
  double move_time_us = 0.0;
  double gate_time_us = 0.0;
  double total_time_us = 0.0;
  double move_to_gate_ratio = 0.0;
};

inline TimeBudget time_budget(const ActuatorItinerary& itinerary, double tip_speed_nm_per_us = 0.23) {
  if (!(tip_speed_nm_per_us > 0.0)) throw DomainError("tip speed must be positive");
  TimeBudget out;
  for (const auto& s : itinerary.steps) {
    if (s.kind == ItineraryKind::move)
      out.move_time_us += s.distance_nm / tip_speed_nm_per_us;
    else
      out.gate_time_us += s.duration_us;
  }
  out.total_time_us = out.move_time_us + out.gate_time_us;
  out.move_to_gate_ratio = out.gate_time_us > 0.0 ? out.move_time_us / out.gate_time_us : 0.0;
  return out;
}

namespace detail {

class SiteGraph {
 public:
  SiteGraph(const QubitLattice& lattice, const CompileOptions& options) {
    const auto adj = lattice.adjacency();
    for (std::size_t q = 0; q < lattice.size(); ++q) add({q, q}, lattice, options);
    for (std::size_t a = 0; a < lattice.size(); ++a)
      for (auto b : adj[a]) add({a, b}, lattice, options);
    for (std::size_t i = 0; i < sites_.size(); ++i)
      for (std::size_t j = i + 1; j < sites_.size(); ++j)
        if (linked(sites_[i], sites_[j], lattice)) {
          const double d = (pos_[i] - pos_[j]).norm();
          edges_[i].push_back({j, d});
          edges_[j].push_back({i, d});
        }
  }

  std::size_t id(const Site& s) const { return index_.at(s); }
  const Site& site(std::size_t i) const { return sites_[i]; }

  /// Shortest route by distance, fewest hops on ties; returns the visited ids after `from`.
  std::vector<std::size_t> route(std::size_t from, std::size_t to) const {
    using Key = std::pair<double, std::size_t>;
    const std::size_t n = sites_.size();
    std::vector<Key> best(n, {std::numeric_limits<double>::infinity(), 0});
    std::vector<std::size_t> prev(n, n);
    std::priority_queue<std::pair<Key, std::size_t>, std::vector<std::pair<Key, std::size_t>>, std::greater<>> pq;
    best[from] = {0.0, 0};
    pq.push({best[from], from});
    while (!pq.empty()) {
      const auto [key, u] = pq.top();
      pq.pop();
      if (key > best[u]) continue;
      for (const auto& [v, d] : edges_[u]) {
        const Key cand{key.first + d, key.second + 1};
        if (cand.first < best[v].first - 1e-12 ||
            (std::abs(cand.first - best[v].first) <= 1e-12 && cand.second < best[v].second)) {
          best[v] = cand;
          prev[v] = u;
          pq.push({cand, v});
        }
      }
    }
    std::vector<std::size_t> out;
    for (std::size_t v = to; v != from; v = prev[v]) {
      if (v == n) throw GeometryError("actuator site is unreachable");
      out.push_back(v);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  double distance(std::size_t i, std::size_t j) const { return (pos_[i] - pos_[j]).norm(); }

 private:
  void add(const Site& s, const QubitLattice& lattice, const CompileOptions& options) {
    Vec3 p = lattice.positions[s.a];
    if (!s.top()) p += options.cnot_offset_nm * (lattice.positions[s.b] - p).normalized();
    p.z() += options.tip_height_nm;
    index_[s] = sites_.size();
    sites_.push_back(s);
    pos_.push_back(p);
    edges_.emplace_back();
  }

  // Tops of neighbouring qubits, a top and any site over that qubit's bonds,
  // and CNOT sites sharing a qubit are one move apart.
  static bool linked(const Site& x, const Site& y, const QubitLattice& lattice) {
    if (x.top() && y.top()) return lattice.adjacent(x.a, y.a);
    if (x.top() || y.top()) {
      const Site& t = x.top() ? x : y;
      const Site& m = x.top() ? y : x;
      return t.a == m.a || t.a == m.b;
    }
    return x.a == y.a || x.a == y.b || x.b == y.a || x.b == y.b;
  }

  std::vector<Site> sites_;
  std::vector<Vec3> pos_;
  std::vector<std::vector<std::pair<std::size_t, double>>> edges_;
  std::map<Site, std::size_t> index_;
};

}  // namespace detail

/// Compiles a circuit into actuator moves and gates. Single-qubit gates run
/// above their qubit; CNOTs run at the offset site between control and target.
/// A non-adjacent CNOT first walks the control along a shortest lattice path
/// with nearest-neighbour SWAPs.
inline ActuatorItinerary compile(const LogicalCircuit& circuit, const QubitLattice& lattice,
                                 const GateDurations& durations = {}, const CompileOptions& options = {}) {
  lattice.validate();
  durations.validate();
  if (circuit.qubit_count > lattice.size())
    throw GeometryError("circuit has more qubits than the lattice");
  circuit.validate();
  if (options.start_qubit >= lattice.size()) throw GeometryError("start qubit outside the lattice");
  if (!(options.tip_speed_nm_per_us > 0.0)) throw DomainError("tip speed must be positive");

  const detail::SiteGraph graph(lattice, options);
  ActuatorItinerary out;
  std::vector<std::size_t> phys(circuit.qubit_count);
  for (std::size_t q = 0; q < phys.size(); ++q) phys[q] = q;
  std::size_t here = graph.id({options.start_qubit, options.start_qubit});

  auto emit = [&](ItineraryKind kind, const Site& site, double duration, double distance) {
    out.steps.push_back({out.steps.size(), kind, to_string(site), duration, distance, site});
    if (kind == ItineraryKind::move) {
      ++out.move_count;
      out.move_time_us += duration;
    } else {
      ++out.gate_count;
      out.gate_time_us += duration;
    }
  };
  auto go = [&](const Site& site) {
    const std::size_t target = graph.id(site);
    for (auto next : graph.route(here, target)) {
      const double d = graph.distance(here, next);
      emit(ItineraryKind::move, graph.site(next), d / options.tip_speed_nm_per_us, d);
      here = next;
    }
  };
  auto swap_physical = [&](std::size_t a, std::size_t b) {
    go({a, b});
    emit(ItineraryKind::swap, {a, b}, durations.swap_us, 0.0);
    for (auto& p : phys) {
      if (p == a)
        p = b;
      else if (p == b)
        p = a;
    }
  };

  for (const auto& gate : circuit.gates) {
    if (gate.kind == GateKind::single) {
      const Site s{phys[gate.q1], phys[gate.q1]};
      go(s);
      emit(ItineraryKind::single, s, durations.single(gate.unitary), 0.0);
      continue;
    }
    const auto path = lattice.path(phys[gate.q1], phys[gate.q2]);
    std::vector<std::pair<std::size_t, std::size_t>> swaps;
    for (std::size_t i = 0; i + 2 < path.size(); ++i) {
      swap_physical(path[i], path[i + 1]);
      swaps.emplace_back(path[i], path[i + 1]);
    }
    const Site s{path[path.size() - 2], path.back()};
    go(s);
    emit(ItineraryKind::cnot, s, durations.cnot_us, 0.0);
    if (options.restore_layout)
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) swap_physical(it->second, it->first);
  }

  out.operation_count = out.move_count + out.gate_count;
  out.final_layout = phys;
  const double bound = options.operation_constant * static_cast<double>(circuit.gates.size()) *
                       static_cast<double>(lattice.size());
  if (static_cast<double>(out.operation_count) > std::max(bound, 0.0))
    throw std::logic_error("itinerary exceeds the O(nN) operation bound");
  return out;
}

}  // namespace nvdfq
