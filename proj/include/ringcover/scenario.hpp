#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ringcover/curve.hpp"
#include "ringcover/field.hpp"
#include "ringcover/coverage.hpp"
#include "ringcover/protocol.hpp"

namespace ringcover {

enum class Mode { single_layer, multi_layer, both };

struct DensitySpec {
  enum class Kind { uniform, linear_phase, table };
  Kind kind = Kind::linear_phase;
  std::vector<std::pair<double, double>> samples;
};

struct InitSpec {
  enum class Kind { disk, explicit_positions };
  Kind kind = Kind::disk;
  double radius = 0.8;
  std::vector<std::pair<double, double>> positions;
};

/// Everything needed to reproduce one simulation.
struct Scenario {
  Mode mode = Mode::multi_layer;
  /// Innermost first.
  std::vector<CurveSpec> layers;
  int grid_cells = kDefaultGridCells;
  double gamma = 1.0;
  DensitySpec density;
  int agent_count = 1;
  InitSpec init;
  Gains gains;
  ProtocolParams protocol;
  double dt = 1e-2;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  bool convergence_stop = true;
  /// Agent rows are written for the start positions, then every
  /// `agent_stride` rounds and at the last round.
  int agent_stride = 1;

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;

  /// Number of rounds, ceil(horizon / dt).
  long rounds() const;

  std::vector<LayerCurve> build_curves() const;
  /// The layer fields, each with the density normalized to unit mass.
  std::vector<LayerField> build_fields() const;
};

/// Parses a scenario document. Missing required keys and unknown keys are
/// errors that name the key.
Scenario scenario_from_json(const nlohmann::json& doc);

/// The fully resolved scenario, defaults included. Parsing it back yields an
/// identical scenario.
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::string& path);

/// Applies `a.b.c=value` to a raw scenario document. The value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

std::string mode_name(Mode m);

/// The three-layer case study: sinusoidal layers of base 1, 2, 3, amplitude
/// 0.15 and frequencies 4, 10, 40; 50 agents started in a disk of radius 0.8;
/// density proportional to the phase.
Scenario case_study_scenario();

}  // namespace ringcover
