#include "ringcover/engine.hpp"

#include "ringcover/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace ringcover {

namespace {

constexpr double kMinPhaseSeparation = 1e-9;
constexpr double kMonotoneTolerance = 1e-8;
constexpr double kStillSpeed = 1e-6;
constexpr long kQuietRounds = 500;

bool phase_clashes(Phase p, const std::vector<Phase>& taken) {
  for (Phase q : taken) {
    if (ang_dist(p, q) < kMinPhaseSeparation) return true;
  }
  return false;
}

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      state_ ^= (v >> (8 * b)) & 0xffu;
      state_ *= 0x100000001b3ull;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  void add(long v) { add(static_cast<std::uint64_t>(v)); }
  void add(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  void add(const std::string& s) {
    for (unsigned char ch : s) {
      state_ ^= ch;
      state_ *= 0x100000001b3ull;
    }
    add(static_cast<std::uint64_t>(s.size()));
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

class Runner {
 public:
  Runner(const Scenario& sc, Mode mode)
      : sc_(sc), mode_(mode), fields_(sc.build_fields()) {
    if (mode == Mode::both) throw std::invalid_argument("run() needs a single mode");
    layer_count_ = mode == Mode::single_layer ? 1 : static_cast<int>(fields_.size());
    patrol_radius_ = fields_.back().curve().max_radius() + sc.protocol.patrol_margin;
    trace_.mode = mode;
    trace_.layer_count = layer_count_;
    prev_h_.assign(static_cast<std::size_t>(layer_count_), -1.0);
    prev_members_.resize(static_cast<std::size_t>(layer_count_));
  }

  SimulationTrace run() {
    place_agents();
    record_agents(0);
    const long rounds = sc_.rounds();
    for (long tick = 1; tick <= rounds; ++tick) {
      if (!round(tick)) break;
      if (trace_.converged) break;
    }
    trace_.final_agents = agents_;
    return std::move(trace_);
  }

 private:
  AgentState& agent(int id) { return agents_.at(static_cast<std::size_t>(id - 1)); }

  void event(long tick, const char* kind, int id, int layer, int other = kNoAgent) {
    trace_.events.push_back({tick, tick * sc_.dt, kind, id, layer, other});
  }

  void place_agents() {
    const auto points = initial_placement(sc_.init, sc_.agent_count, sc_.seed);
    agents_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      AgentState& a = agents_[i];
      a.id = static_cast<int>(i) + 1;
      a.set_position(points[i].first, points[i].second);
      a.target_layer = 1;
      a.detect = DetectState::Open;
      a.role = mode_ == Mode::single_layer ? Role::Layer : Role::Free;
    }
    if (mode_ == Mode::single_layer) {
      settle(1, 0);
      check_order(1, 0);
    }
  }

  std::vector<int> layer_ids(int k) const {
    std::vector<int> ids;
    for (const AgentState& a : agents_) {
      if (a.role == Role::Layer && a.target_layer == k) ids.push_back(a.id);
    }
    return ids;
  }

  LayerAssembly assembly_for(int k) const {
    std::vector<Member> ms;
    for (const AgentState& a : agents_) {
      if (a.role == Role::Layer && a.target_layer == k) {
        ms.push_back({a.id, a.phase, a.division.value_or(a.phase + kPi), a.radius});
      }
    }
    return LayerAssembly(fields_[static_cast<std::size_t>(k - 1)], std::move(ms));
  }

  // Division-point reset for every member whose clockwise neighbour changed.
  void settle(int k, long tick) {
    const LayerAssembly as = assembly_for(k);
    for (std::size_t i = 0; i < as.size(); ++i) {
      const Member& m = as.at(i);
      const Member& prev = as.at(as.alpha(i));
      AgentState& a = agent(m.id);
      if (a.alpha == prev.id && a.division) continue;
      if (a.alpha != kNoAgent && tick > 0) event(tick, "neighbor_change", m.id, k, prev.id);
      a.alpha = prev.id;
      a.division = as.size() == 1 ? m.phase + kPi : division_reset(m.phase, prev.phase);
    }
  }

  bool check_order(int k, long tick) {
    try {
      const LayerAssembly as = assembly_for(k);
      as.validate();
      if (!as.empty()) trace_.monitors.min_gap = std::min(trace_.monitors.min_gap, as.min_gap());
    } catch (const OrderingError& e) {
      fail(tick, e.agent_id(), e.what());
      return false;
    }
    return true;
  }

  void fail(long tick, int id, const std::string& message) {
    trace_.failure = Failure{tick, id, message};
    event(tick, "breach", id, 0);
  }

  bool round(long tick) {
    const Snapshot snap = take_snapshot(agents_, layer_count_);
    const LayerRegistry reg =
        rebuild_registry(agents_, layer_count_, sc_.protocol.delta, patrol_radius_);
    std::vector<bool> changed(static_cast<std::size_t>(layer_count_), false);
    double max_speed = 0.0;

    // working agents: one single-layer step per layer
    for (int k = 1; k <= layer_count_; ++k) {
      if (reg.count(k) == 0) continue;
      settle(k, tick);
      LayerAssembly as = assembly_for(k);
      std::map<int, int> alpha_of;
      for (std::size_t i = 0; i < as.size(); ++i) alpha_of[as.at(i).id] = as.at(as.alpha(i)).id;
      StepReport report;
      try {
        report = step_single_layer(as, sc_.gains, sc_.dt);
      } catch (const OrderingError& e) {
        fail(tick, e.agent_id(), e.what());
        return false;
      }
      max_speed = std::max(max_speed, report.max_speed);
      trace_.monitors.min_gap = std::min(trace_.monitors.min_gap, report.min_gap);
      for (const Member& m : as.members()) {
        AgentState& a = agent(m.id);
        a.set_polar(m.radius, m.phase.value());
        a.division = m.division;
        a.alpha = alpha_of.at(m.id);
      }
    }

    // layer change toward an inner layer that needs help, decided on the snapshot
    std::vector<int> demoted;
    if (mode_ == Mode::multi_layer) {
      for (const AgentState& s : snap.agents) {
        if (weight_based_layer_change(s, snap)) demoted.push_back(s.id);
      }
    }

    // free agents
    struct Request {
      int id;
      EntryDecision decision;
    };
    std::vector<Request> requests;
    for (const AgentState& s : snap.agents) {
      if (s.role != Role::Free) continue;
      AgentState& a = agent(s.id);
      if (s.target_layer == 0) {
        const int k = identify_target_layer(s, snap);
        if (k == 0) {
          patrol_step(a, sc_.protocol.omega0, sc_.dt);
          radial_drift(a, patrol_radius_, sc_.gains.kappa_r, sc_.dt);
          continue;
        }
        a.target_layer = k;
        event(tick, "target", s.id, k);
      }
      const LayerCurve& curve = fields_[static_cast<std::size_t>(a.target_layer - 1)].curve();
      if (s.target_layer != 0 && in_band(s, curve, sc_.protocol.delta)) {
        requests.push_back({s.id, request_entry(s, s.target_layer, snap)});
      } else {
        const double r0 = a.radius;
        approach_step(a, curve, sc_.gains.kappa_r, sc_.dt);
        max_speed = std::max(max_speed, std::abs(a.radius - r0) / sc_.dt);
      }
    }

    // commit: admissions, lowest id first within each (layer, incumbent) slot
    std::set<std::pair<int, int>> taken;
    std::set<int> entrants;
    for (const Request& rq : requests) {
      AgentState& a = agent(rq.id);
      const int k = rq.decision.layer;
      const std::pair<int, int> slot{k, rq.decision.incumbent};
      if (rq.decision.outcome == EntryOutcome::Rejected) {
        a.target_layer = 0;
        event(tick, "reject", rq.id, k, rq.decision.incumbent);
        continue;
      }
      if (!taken.insert(slot).second) {
        a.target_layer = 0;
        event(tick, "reject", rq.id, k, rq.decision.incumbent);
        continue;
      }
      // an entrant never shares a phase with a member of its new layer
      for (int guard = 0; guard < 1000; ++guard) {
        bool clash = false;
        for (const AgentState& b : agents_) {
          if (b.role == Role::Layer && b.target_layer == k && b.phase == a.phase) clash = true;
        }
        if (!clash) break;
        patrol_step(a, sc_.protocol.omega0, sc_.dt);
      }
      a.role = Role::Layer;
      a.detect = DetectState::Open;
      if (rq.decision.incumbent == kNoAgent) {
        a.alpha = a.id;
        a.division = a.phase + kPi;
      } else {
        a.alpha = kNoAgent;
        a.division.reset();
      }
      entrants.insert(rq.id);
      changed[static_cast<std::size_t>(k - 1)] = true;
      event(tick, "admit", rq.id, k, rq.decision.incumbent);
    }
    for (int id : demoted) {
      AgentState& a = agent(id);
      const int k = a.target_layer;
      changed[static_cast<std::size_t>(k - 1)] = true;
      a.role = Role::Free;
      a.target_layer = k - 1;
      a.division.reset();
      a.alpha = kNoAgent;
      a.detect = DetectState::Open;
      event(tick, "demote", id, k, k - 1);
    }
    for (int k = 1; k <= layer_count_; ++k) {
      if (!changed[static_cast<std::size_t>(k - 1)]) continue;
      settle(k, tick);
      if (!check_order(k, tick)) return false;
    }

    // post-commit coverage, detect states and probabilities
    RoundRecord rec;
    rec.tick = tick;
    rec.t = tick * sc_.dt;
    for (int k = 1; k <= layer_count_; ++k) {
      const LayerAssembly as = assembly_for(k);
      const LayerField& field = fields_[static_cast<std::size_t>(k - 1)];
      double h = 0.0;
      for (std::size_t i = 0; i < as.size(); ++i) {
        const SegmentIntegrals seg = integrate_segment(as, i);
        h += seg.coverage;
        AgentState& a = agent(as.at(i).id);
        if (!entrants.count(a.id)) a.detect = update_detect_state(completion_rate(seg), sc_.protocol.h);
      }
      const double pk = std::clamp(h / field.density().total_mass(), 0.0, 1.0);
      rec.layer_h.push_back(h);
      rec.layer_p.push_back(pk);

      std::vector<int> ids = layer_ids(k);
      const auto ki = static_cast<std::size_t>(k - 1);
      if (!changed[ki] && prev_h_[ki] >= 0.0 && ids == prev_members_[ki]) {
        const double drop = prev_h_[ki] - h;
        if (drop > kMonotoneTolerance) {
          ++trace_.monitors.h_decreases;
          event(tick, "h_decrease", kNoAgent, k);
        }
        trace_.monitors.worst_h_drop = std::max(trace_.monitors.worst_h_drop, drop);
      }
      prev_h_[ki] = h;
      prev_members_[ki] = std::move(ids);
    }
    rec.p = total_detection_probability(rec.layer_p);

    const LayerRegistry after =
        rebuild_registry(agents_, layer_count_, sc_.protocol.delta, patrol_radius_);
    int counted = after.n_free;
    for (int k = 1; k <= layer_count_; ++k) counted += after.count(k);
    if (counted != sc_.agent_count || after.n_layer + after.n_free != sc_.agent_count) {
      trace_.monitors.conservation_ok = false;
      fail(tick, kNoAgent, "agent count is no longer conserved");
      trace_.rounds.push_back(std::move(rec));
      return false;
    }

    trace_.rounds.push_back(std::move(rec));
    if (tick % sc_.agent_stride == 0 || tick == sc_.rounds()) record_agents(tick);

    const bool membership_event =
        std::any_of(changed.begin(), changed.end(), [](bool c) { return c; });
    quiet_ = membership_event ? 0 : quiet_ + 1;
    if (sc_.convergence_stop && max_speed < kStillSpeed && quiet_ >= kQuietRounds) {
      trace_.converged = true;
      event(tick, "converged", kNoAgent, 0);
      if (tick % sc_.agent_stride != 0 && tick != sc_.rounds()) record_agents(tick);
      check_bounds();
    }
    return true;
  }

  void record_agents(long tick) {
    for (const AgentState& a : agents_) {
      AgentRecord r;
      r.tick = tick;
      r.id = a.id;
      r.x = a.x;
      r.y = a.y;
      r.phi = a.phase.value();
      r.r = a.radius;
      r.role = a.role;
      r.layer = a.target_layer;
      if (a.role == Role::Layer && a.division) r.division = a.division->value();
      r.detect = a.detect;
      trace_.agents.push_back(r);
    }
  }

  void check_bounds() {
    MonitorStats& m = trace_.monitors;
    m.length_bounds_checked = true;
    for (int k = 1; k <= layer_count_; ++k) {
      const LengthBounds b = check_length_bounds(assembly_for(k));
      if (b.ok) continue;
      m.length_bounds_ok = false;
      m.length_bounds_detail += "layer " + std::to_string(k) + ": min " + std::to_string(b.min_length) +
                                " max " + std::to_string(b.max_length) + " of " +
                                std::to_string(b.total) + "; ";
    }
  }

  const Scenario& sc_;
  Mode mode_;
  std::vector<LayerField> fields_;
  int layer_count_ = 0;
  double patrol_radius_ = 0.0;
  std::vector<AgentState> agents_;
  SimulationTrace trace_;
  std::vector<double> prev_h_;
  std::vector<std::vector<int>> prev_members_;
  long quiet_ = 0;
};

}  // namespace

std::uint64_t SimulationTrace::hash() const {
  Fnv1a h;
  h.add(mode_name(mode));
  h.add(layer_count);
  for (const RoundRecord& r : rounds) {
    h.add(r.tick);
    h.add(r.t);
    for (double v : r.layer_p) h.add(v);
    for (double v : r.layer_h) h.add(v);
    h.add(r.p);
  }
  for (const AgentRecord& a : agents) {
    h.add(a.tick);
    h.add(a.id);
    h.add(a.x);
    h.add(a.y);
    h.add(a.phi);
    h.add(a.r);
    h.add(static_cast<int>(a.role));
    h.add(a.layer);
    h.add(a.division ? *a.division : -1.0);
    h.add(static_cast<int>(a.detect));
  }
  for (const Event& e : events) {
    h.add(e.tick);
    h.add(e.kind);
    h.add(e.agent);
    h.add(e.layer);
    h.add(e.other);
  }
  return h.value();
}

std::vector<std::pair<double, double>> initial_placement(const InitSpec& spec, int count,
                                                         std::uint64_t seed) {
  std::vector<std::pair<double, double>> out;
  std::vector<Phase> taken;
  if (spec.kind == InitSpec::Kind::explicit_positions) {
    if (static_cast<int>(spec.positions.size()) != count) {
      throw std::invalid_argument("explicit placement lists the wrong number of agents");
    }
    for (const auto& [x, y] : spec.positions) {
      const Phase p = phase_of(x, y);
      if (phase_clashes(p, taken)) {
        throw std::invalid_argument("explicit placement repeats a phase");
      }
      taken.push_back(p);
      out.emplace_back(x, y);
    }
    return out;
  }
  SeededRng rng(seed);
  while (static_cast<int>(out.size()) < count) {
    const double r = spec.radius * std::sqrt(rng.unit());
    const double phi = kTwoPi * rng.unit();
    const double x = r * std::cos(phi);
    const double y = r * std::sin(phi);
    const Phase p = phase_of(x, y);
    if (r == 0.0 || phase_clashes(p, taken)) continue;
    taken.push_back(p);
    out.emplace_back(x, y);
  }
  return out;
}

SimulationTrace run(const Scenario& scenario, Mode mode) {
  Runner runner(scenario, mode);
  return runner.run();
}

std::vector<SimulationTrace> run_all(const Scenario& scenario) {
  std::vector<SimulationTrace> out;
  if (scenario.mode == Mode::both) {
    out.push_back(run(scenario, Mode::single_layer));
    out.push_back(run(scenario, Mode::multi_layer));
  } else {
    out.push_back(run(scenario, scenario.mode));
  }
  return out;
}

}  // namespace ringcover
