#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ringcover/protocol.hpp"
#include "ringcover/scenario.hpp"

namespace ringcover {

struct AgentRecord {
  long tick = 0;
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double r = 0.0;
  Role role = Role::Free;
  int layer = 0;
  std::optional<double> division;
  DetectState detect = DetectState::Open;
};

struct RoundRecord {
  long tick = 0;
  double t = 0.0;
  std::vector<double> layer_p;
  std::vector<double> layer_h;
  double p = 0.0;
};

struct Event {
  long tick = 0;
  double t = 0.0;
  std::string kind;
  int agent = kNoAgent;
  int layer = 0;
  int other = kNoAgent;
};

/// Runtime checks of the trajectory-level guarantees.
struct MonitorStats {
  /// Rounds where a layer's H fell by more than 1e-8 with its members unchanged.
  long h_decreases = 0;
  double worst_h_drop = 0.0;
  /// Smallest gap between any working agent and the ends of its segment.
  double min_gap = kTwoPi;
  bool conservation_ok = true;
  /// Segment-length bounds, checked once the convergence stop fires.
  bool length_bounds_checked = false;
  bool length_bounds_ok = true;
  std::string length_bounds_detail;
};

struct Failure {
  long tick = 0;
  int agent = kNoAgent;
  std::string message;
};

struct SimulationTrace {
  Mode mode = Mode::multi_layer;
  int layer_count = 0;
  std::vector<RoundRecord> rounds;
  std::vector<AgentRecord> agents;
  std::vector<Event> events;
  MonitorStats monitors;
  std::optional<Failure> failure;
  bool converged = false;
  std::vector<AgentState> final_agents;

  /// FNV-1a over every record, event and the bit patterns of all values.
  std::uint64_t hash() const;
  double final_p() const { return rounds.empty() ? 0.0 : rounds.back().p; }
};

/// Agent start positions: seeded uniform draws in a disk, or the explicit
/// list. Phases are pairwise at least 1e-9 rad apart; disk draws are redrawn
/// until they are, explicit lists with repeated phases are rejected.
std::vector<std::pair<double, double>> initial_placement(const InitSpec& spec, int count,
                                                         std::uint64_t seed);

/// Runs one scenario in `mode`, which must be single_layer or multi_layer.
/// In single-layer mode every agent works on the innermost layer from the
/// start. Invariant breaches stop the run and are reported in `failure`.
SimulationTrace run(const Scenario& scenario, Mode mode);

/// Runs in the scenario's own mode; for mode both, single-layer first.
std::vector<SimulationTrace> run_all(const Scenario& scenario);

}  // namespace ringcover
