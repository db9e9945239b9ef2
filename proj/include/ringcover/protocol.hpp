#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ringcover/coverage.hpp"

namespace ringcover {

enum class Role { Free, Layer };
enum class DetectState { Open, Saturated };

inline constexpr int kNoAgent = -1;

struct AgentState {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  Phase phase;
  double radius = 0.0;
  Role role = Role::Free;
  /// Layer index, 1-based; 0 means no target.
  int target_layer = 1;
  /// Set only while role == Layer.
  std::optional<Phase> division;
  DetectState detect = DetectState::Open;
  /// Clockwise neighbour seen at the last division-point update.
  int alpha = kNoAgent;

  /// Moves the agent and re-derives phase and radius from the position.
  void set_position(double px, double py);
  void set_polar(double r, double phi) { set_position(r * std::cos(phi), r * std::sin(phi)); }
};

struct ProtocolParams {
  double h = 0.6;
  /// Half-width of the entry band around a layer.
  double delta = 0.05;
  double omega0 = 0.2;
  /// Patrol ring sits this far outside the outermost layer's largest radius.
  double patrol_margin = 0.2;
};

/// Per-round membership counts, rebuilt from scratch every round.
struct LayerRegistry {
  /// members[k - 1] holds the ids on layer k in ascending id order.
  std::vector<std::vector<int>> members;
  int n_layer = 0;
  int n_free = 0;
  double band_width = 0.0;
  double patrol_radius = 0.0;

  int layer_count() const noexcept { return static_cast<int>(members.size()); }
  int count(int k) const { return static_cast<int>(members.at(static_cast<std::size_t>(k - 1)).size()); }
};

LayerRegistry rebuild_registry(std::span<const AgentState> agents, int layer_count,
                               double band_width = 0.0, double patrol_radius = 0.0);

/// What other agents may read about a working agent.
struct PublicMember {
  int id = 0;
  Phase phase;
  Phase division;
  DetectState detect = DetectState::Open;
};

/// Members of one layer in counterclockwise phase order.
struct LayerView {
  std::vector<PublicMember> members;

  bool empty() const noexcept { return members.empty(); }
  /// Index of the member whose segment [s_j, s_beta) contains `p`, or -1 if
  /// the layer is empty.
  int owner_of(Phase p) const;
};

/// The frozen state every agent decides against during one round.
struct Snapshot {
  std::vector<AgentState> agents;
  /// layers[k - 1] is layer k.
  std::vector<LayerView> layers;

  const LayerView& layer(int k) const { return layers.at(static_cast<std::size_t>(k - 1)); }
};

Snapshot take_snapshot(std::span<const AgentState> agents, int layer_count);

/// eta = coverage / mass over the segment; 1 when the mass is below 1e-12.
double completion_rate(const SegmentIntegrals& segment);
double completion_rate(const LayerAssembly& assembly, int id);

/// Saturated iff eta > h (strict).
DetectState update_detect_state(double eta, double h);

/// Circular patrol at constant radius: advances the phase by omega0 * dt.
void patrol_step(AgentState& agent, double omega0, double dt);

/// Radial move toward R_k(phi) at fixed phase.
void approach_step(AgentState& agent, const LayerCurve& target, double kappa_r, double dt);

/// Radial move toward a fixed radius at fixed phase.
void radial_drift(AgentState& agent, double target_radius, double kappa_r, double dt);

/// True when R_k(phi) - delta <= r <= R_k(phi) + delta.
bool in_band(const AgentState& agent, const LayerCurve& curve, double delta);

/// Innermost layer that is empty or whose member covering the agent's phase
/// is Open; 0 when none admits.
int identify_target_layer(const AgentState& agent, const Snapshot& snapshot);

enum class EntryOutcome { Admitted, Rejected };

struct EntryDecision {
  EntryOutcome outcome = EntryOutcome::Rejected;
  int layer = 0;
  /// Member whose segment the agent lands in; kNoAgent for an empty layer.
  int incumbent = kNoAgent;
};

/// Admission depends only on the incumbent's detect state in the snapshot.
EntryDecision request_entry(const AgentState& agent, int k, const Snapshot& snapshot);

/// (alpha, beta): nearest clockwise and counterclockwise members of layer k.
std::pair<int, int> find_neighbors(int id, int k, const Snapshot& snapshot);
std::pair<int, int> find_neighbors(int id, const LayerView& layer);

/// s = phi - delta(phi, phi_alpha) / 2, reduced into [0, 2pi).
Phase division_reset(Phase phi, Phase phi_alpha);

struct DivisionUpdate {
  /// True when the clockwise neighbour changed and s was reset; otherwise
  /// the caller runs the single-layer step for this agent.
  bool reset = false;
  int alpha = kNoAgent;
  Phase division;
};

DivisionUpdate maintain_division_point(const AgentState& agent, int prev_alpha,
                                       const Snapshot& snapshot);

/// True when a Layer agent on k > 1 sits inside the segment of an Open
/// member of layer k - 1 and should drop down to help it.
bool weight_based_layer_change(const AgentState& agent, const Snapshot& snapshot);

/// P = 1 - prod(1 - P_k). Throws std::invalid_argument for values outside [0, 1].
double total_detection_probability(std::span<const double> per_layer);

}  // namespace ringcover
