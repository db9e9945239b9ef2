#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ringcover/coverage.hpp"
#include "ringcover/engine.hpp"
#include "ringcover/scenario.hpp"

namespace ringcover {

struct GradientCheck {
  double analytic = 0.0;
  double numeric = 0.0;
  double abs_error = 0.0;
  /// |analytic - numeric| / max(|analytic|, |numeric|); 0 when both vanish.
  double rel_error = 0.0;
};

/// Compares dH/dphi_i from the segment integrals with a central difference of
/// H, division points held fixed. `step` must lie in [1e-7, 1e-3].
GradientCheck fd_gradient_check(const LayerAssembly& assembly, std::size_t idx, double step);

struct GridOptimum {
  std::vector<Phase> phases;
  double value = 0.0;
  /// Set when the first agent was pinned to phase 0.
  bool symmetric = false;
  long evaluated = 0;
};

/// Exhaustive search over agent phases on a uniform phase grid, with division
/// points at geodesic midpoints. The first phase is pinned to 0 when the
/// layer is a circle with uniform density; otherwise n must be at most 3.
GridOptimum brute_force_optimum(const LayerField& field, int n, int grid);

/// Radius below which H is concave in each phase on a circle: sqrt(2) gamma / (2 pi).
double corollary_radius_bound(double gamma);

/// Largest possible drop of H when member `idx` leaves a layer with at least
/// two members, the division points being at midpoints.
double lemma6_reduction_bound(const LayerAssembly& assembly, std::size_t idx);

/// Smallest rise of H when an agent enters at `entering`. On an empty layer
/// this is the lone agent's full coverage.
double lemma7_increase_bound(const LayerAssembly& assembly, Phase entering);

struct TransferVerdict {
  bool beneficial = false;
  /// 1 - P_v - P_v' <= 0; the inequality no longer constrains anything.
  bool degenerate = false;
};

TransferVerdict theorem2_transfer_beneficial(double p_k, double p_v, double p_k_prime,
                                             double p_v_prime);

/// The layer after member `idx` leaves; its counterclockwise neighbour takes
/// over up to the leaver's phase.
LayerAssembly depart(const LayerAssembly& assembly, std::size_t idx);

/// The layer after agent `id` enters at `phase` with midpoint division points
/// for itself and its counterclockwise neighbour.
LayerAssembly enter(const LayerAssembly& assembly, int id, Phase phase);

struct ConvergeResult {
  double coverage = 0.0;
  double max_abs_gradient = 0.0;
  int steps = 0;
  /// Largest one-step fall of H seen on the way.
  double worst_drop = 0.0;
};

/// Steps the layer until every |dH/dphi_i| falls below `gradient_tol` or
/// `max_steps` is reached.
ConvergeResult converge(LayerAssembly& assembly, const Gains& gains, double dt, int max_steps,
                        double gradient_tol);

/// Runs a scenario document in its own mode (multi-layer for mode both).
/// Results are kept for the life of the process, keyed by the document.
const SimulationTrace& cached_run(const nlohmann::json& scenario_doc);

/// Outcome of one fixture.
struct CheckOutcome {
  bool passed = true;
  std::vector<std::pair<std::string, double>> values;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::vector<nlohmann::json> fixtures;
  std::vector<CheckOutcome> outcomes;
  std::vector<std::string> notes;
  double seconds = 0.0;

  std::size_t failures() const;
};

std::vector<std::string> suite_names();

/// Runs a named suite with its built-in, seeded fixtures.
SuiteResult run_suite(const std::string& name);

/// Re-runs the check recorded in a fixture document.
CheckOutcome replay_fixture(const nlohmann::json& fixture);

/// Writes <name>.csv, <name>.txt and one JSON per failed fixture under
/// failures/.
void write_suite_outputs(const std::filesystem::path& dir, const SuiteResult& result);

/// One row per suite: suite,fixtures,failures,passed,seconds.
void write_verify_summary(const std::filesystem::path& dir, const std::vector<SuiteResult>& results);

}  // namespace ringcover
