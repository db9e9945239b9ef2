#include "ringcover/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ringcover {

void AgentState::set_position(double px, double py) {
  x = px;
  y = py;
  phase = phase_of(px, py);
  radius = std::hypot(px, py);
}

LayerRegistry rebuild_registry(std::span<const AgentState> agents, int layer_count,
                               double band_width, double patrol_radius) {
  LayerRegistry reg;
  reg.members.resize(static_cast<std::size_t>(layer_count));
  reg.band_width = band_width;
  reg.patrol_radius = patrol_radius;
  for (const AgentState& a : agents) {
    if (a.role == Role::Layer) {
      if (a.target_layer < 1 || a.target_layer > layer_count) {
        throw std::logic_error("agent " + std::to_string(a.id) + " works on unknown layer " +
                               std::to_string(a.target_layer));
      }
      reg.members[static_cast<std::size_t>(a.target_layer - 1)].push_back(a.id);
      ++reg.n_layer;
    } else {
      ++reg.n_free;
    }
  }
  for (auto& ids : reg.members) std::sort(ids.begin(), ids.end());
  return reg;
}

int LayerView::owner_of(Phase p) const {
  const std::size_t n = members.size();
  if (n == 0) return -1;
  if (n == 1) return 0;
  for (std::size_t j = 0; j < n; ++j) {
    const Phase start = members[j].division;
    const Phase end = members[j + 1 == n ? 0 : j + 1].division;
    if (ccw_gap(p, start) < ccw_gap(end, start)) return static_cast<int>(j);
  }
  // only reachable when division points coincide; fall back to the nearest agent
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (ang_dist(p, members[j].phase) < ang_dist(p, members[best].phase)) best = j;
  }
  return static_cast<int>(best);
}

Snapshot take_snapshot(std::span<const AgentState> agents, int layer_count) {
  Snapshot snap;
  snap.agents.assign(agents.begin(), agents.end());
  snap.layers.resize(static_cast<std::size_t>(layer_count));
  for (const AgentState& a : agents) {
    if (a.role != Role::Layer) continue;
    snap.layers.at(static_cast<std::size_t>(a.target_layer - 1))
        .members.push_back({a.id, a.phase, a.division.value_or(a.phase + kPi), a.detect});
  }
  for (LayerView& view : snap.layers) {
    std::sort(view.members.begin(), view.members.end(),
              [](const PublicMember& a, const PublicMember& b) {
                return a.phase < b.phase || (a.phase == b.phase && a.id < b.id);
              });
  }
  return snap;
}

double completion_rate(const SegmentIntegrals& segment) {
  if (segment.mass < 1e-12) return 1.0;
  return segment.coverage / segment.mass;
}

double completion_rate(const LayerAssembly& assembly, int id) {
  return completion_rate(integrate_segment(assembly, assembly.index_of(id)));
}

DetectState update_detect_state(double eta, double h) {
  return eta > h ? DetectState::Saturated : DetectState::Open;
}

void patrol_step(AgentState& agent, double omega0, double dt) {
  agent.set_polar(agent.radius, agent.phase.value() + omega0 * dt);
}

void approach_step(AgentState& agent, const LayerCurve& target, double kappa_r, double dt) {
  const double r = agent.radius + dt * radial_control(target, agent.phase, agent.radius, kappa_r);
  agent.set_polar(r, agent.phase.value());
}

void radial_drift(AgentState& agent, double target_radius, double kappa_r, double dt) {
  const double r = agent.radius + dt * kappa_r * (target_radius - agent.radius);
  agent.set_polar(r, agent.phase.value());
}

bool in_band(const AgentState& agent, const LayerCurve& curve, double delta) {
  return std::abs(agent.radius - curve.radius(agent.phase)) <= delta;
}

int identify_target_layer(const AgentState& agent, const Snapshot& snapshot) {
  const int layers = static_cast<int>(snapshot.layers.size());
  for (int k = 1; k <= layers; ++k) {
    const LayerView& view = snapshot.layer(k);
    if (view.empty()) return k;
    const int j = view.owner_of(agent.phase);
    if (view.members[static_cast<std::size_t>(j)].detect == DetectState::Open) return k;
  }
  return 0;
}

EntryDecision request_entry(const AgentState& agent, int k, const Snapshot& snapshot) {
  EntryDecision d;
  d.layer = k;
  const LayerView& view = snapshot.layer(k);
  if (view.empty()) {
    d.outcome = EntryOutcome::Admitted;
    return d;
  }
  const PublicMember& j = view.members[static_cast<std::size_t>(view.owner_of(agent.phase))];
  d.incumbent = j.id;
  d.outcome = j.detect == DetectState::Saturated ? EntryOutcome::Rejected : EntryOutcome::Admitted;
  return d;
}

std::pair<int, int> find_neighbors(int id, const LayerView& layer) {
  const auto& ms = layer.members;
  auto self = std::find_if(ms.begin(), ms.end(), [id](const PublicMember& m) { return m.id == id; });
  if (self == ms.end()) {
    throw std::out_of_range("agent " + std::to_string(id) + " is not on this layer");
  }
  if (ms.size() == 1) return {id, id};
  int alpha = kNoAgent;
  int beta = kNoAgent;
  double best_cw = kTwoPi + 1.0;
  double best_ccw = kTwoPi + 1.0;
  for (const PublicMember& m : ms) {
    if (m.id == id) continue;
    const double cw = ccw_gap(self->phase, m.phase);
    const double ccw = ccw_gap(m.phase, self->phase);
    if (cw < best_cw) {
      best_cw = cw;
      alpha = m.id;
    }
    if (ccw < best_ccw) {
      best_ccw = ccw;
      beta = m.id;
    }
  }
  return {alpha, beta};
}

std::pair<int, int> find_neighbors(int id, int k, const Snapshot& snapshot) {
  return find_neighbors(id, snapshot.layer(k));
}

Phase division_reset(Phase phi, Phase phi_alpha) { return phi - 0.5 * ang_dist(phi, phi_alpha); }

DivisionUpdate maintain_division_point(const AgentState& agent, int prev_alpha,
                                       const Snapshot& snapshot) {
  const LayerView& view = snapshot.layer(agent.target_layer);
  const auto [alpha, beta] = find_neighbors(agent.id, view);
  (void)beta;
  DivisionUpdate u;
  u.alpha = alpha;
  u.division = agent.division.value_or(agent.phase + kPi);
  if (alpha == prev_alpha) return u;
  u.reset = true;
  if (alpha == agent.id) {
    u.division = agent.phase + kPi;
  } else {
    auto it = std::find_if(view.members.begin(), view.members.end(),
                           [alpha](const PublicMember& m) { return m.id == alpha; });
    u.division = division_reset(agent.phase, it->phase);
  }
  return u;
}

bool weight_based_layer_change(const AgentState& agent, const Snapshot& snapshot) {
  if (agent.role != Role::Layer || agent.target_layer <= 1) return false;
  const LayerView& inner = snapshot.layer(agent.target_layer - 1);
  if (inner.empty()) return false;
  const PublicMember& j = inner.members[static_cast<std::size_t>(inner.owner_of(agent.phase))];
  return j.detect == DetectState::Open;
}

double total_detection_probability(std::span<const double> per_layer) {
  double miss = 1.0;
  for (double p : per_layer) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("layer probability " + std::to_string(p) + " is outside [0, 1]");
    }
    miss *= 1.0 - p;
  }
  return 1.0 - miss;
}

}  // namespace ringcover
