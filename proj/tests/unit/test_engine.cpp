#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "ringcover/engine.hpp"

using namespace ringcover;

namespace {

Scenario small_multi(int agents = 8) {
  Scenario s;
  s.mode = Mode::multi_layer;
  s.layers = {CircleSpec{1.0}, CircleSpec{2.0}};
  s.grid_cells = 512;
  s.density.kind = DensitySpec::Kind::linear_phase;
  s.agent_count = agents;
  s.init.radius = 0.8;
  s.gains = {1.0, 0.5, 0.5};
  s.protocol.h = 0.6;
  s.dt = 0.05;
  s.horizon = 30.0;
  s.seed = 7;
  s.agent_stride = 10;
  return s;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("disk placement") {
    InitSpec spec;
    spec.radius = 0.8;
    const auto pts = initial_placement(spec, 50, 1);
    REQUIRE(pts.size() == 50);
    std::set<double> phases;
    for (const auto& [x, y] : pts) {
      const double r = std::hypot(x, y);
      CHECK(r > 0.0);
      CHECK(r <= 0.8);
      phases.insert(std::atan2(y, x));
    }
    CHECK(phases.size() == 50);
    CHECK(initial_placement(spec, 50, 1) == pts);
    CHECK(initial_placement(spec, 50, 2) != pts);
  }

  TEST_CASE("explicit placement") {
    InitSpec spec;
    spec.kind = InitSpec::Kind::explicit_positions;
    spec.positions = {{1.0, 0.0}, {0.0, 1.0}};
    Scenario s;
    s.layers = {CircleSpec{1.0}};
    s.agent_count = 2;
    s.init = spec;
    s.dt = 0.1;
    s.horizon = 0.1;
    s.mode = Mode::single_layer;
    const SimulationTrace tr = run(s, Mode::single_layer);
    REQUIRE(tr.agents.size() == 4);
    CHECK(tr.agents[0].tick == 0);
    CHECK(tr.agents[0].phi == 0.0);
    CHECK(tr.agents[1].phi == doctest::Approx(kPi / 2).epsilon(1e-15));

    spec.positions = {{1.0, 0.0}, {2.0, 0.0}};
    CHECK_THROWS_AS(initial_placement(spec, 2, 1), std::invalid_argument);
    spec.positions = {{1.0, 0.0}};
    CHECK_THROWS_AS(initial_placement(spec, 2, 1), std::invalid_argument);
  }

  TEST_CASE("approach keeps the explicit phases") {
    Scenario s = small_multi(2);
    s.init.kind = InitSpec::Kind::explicit_positions;
    s.init.positions = {{0.5, 0.0}, {0.0, 0.5}};
    s.dt = 0.1;
    s.horizon = 0.1;
    const SimulationTrace tr = run(s, Mode::multi_layer);
    REQUIRE(tr.agents.size() == 4);
    CHECK(tr.agents[2].tick == 1);
    CHECK(tr.agents[2].phi == 0.0);
    CHECK(tr.agents[3].phi == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(tr.agents[2].role == Role::Free);
    CHECK(tr.agents[2].r > tr.agents[0].r);
  }

  TEST_CASE("one round gives one record") {
    Scenario s = small_multi();
    s.horizon = s.dt;
    const SimulationTrace tr = run(s, Mode::multi_layer);
    REQUIRE(tr.rounds.size() == 1);
    CHECK(tr.rounds[0].tick == 1);
    CHECK(tr.rounds[0].t == s.dt);
    REQUIRE(tr.agents.size() == 16);
    CHECK(tr.agents.front().tick == 0);
    CHECK(tr.agents.back().tick == 1);
    CHECK_FALSE(tr.failure);
  }

  TEST_CASE("lone agent covers the whole layer") {
    Scenario s;
    s.layers = {CircleSpec{1.0}};
    s.grid_cells = 1024;
    s.density.kind = DensitySpec::Kind::uniform;
    s.agent_count = 1;
    s.init.radius = 0.5;
    s.gains = {1.0, 0.1, 0.1};
    s.dt = 0.05;
    s.horizon = 20.0;
    const SimulationTrace tr = run(s, Mode::multi_layer);
    REQUIRE_FALSE(tr.failure);
    REQUIRE(tr.final_agents.size() == 1);
    CHECK(tr.final_agents[0].role == Role::Layer);
    CHECK(tr.final_agents[0].radius == doctest::Approx(1.0).epsilon(1e-3));
    // (1 / 2pi) * integral of exp(-x^2) over [-pi, pi]
    const double expected = std::sqrt(kPi) * std::erf(kPi) / kTwoPi;
    CHECK(tr.rounds.back().layer_h[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(tr.final_p() == doctest::Approx(expected).epsilon(1e-9));
  }

  TEST_CASE("entry conflicts admit the lowest id") {
    Scenario s;
    s.layers = {CircleSpec{1.0}};
    s.grid_cells = 512;
    s.agent_count = 2;
    s.init.kind = InitSpec::Kind::explicit_positions;
    s.init.positions = {{0.97 * std::cos(0.2), 0.97 * std::sin(0.2)},
                        {0.97 * std::cos(0.1), 0.97 * std::sin(0.1)}};
    s.dt = 0.05;
    s.horizon = 0.05;
    const SimulationTrace tr = run(s, Mode::multi_layer);
    REQUIRE_FALSE(tr.failure);
    bool admitted = false;
    bool rejected = false;
    for (const Event& e : tr.events) {
      if (e.tick != 1) continue;
      if (e.kind == "admit") admitted = admitted || e.agent == 1;
      if (e.kind == "reject") rejected = rejected || e.agent == 2;
      CHECK_FALSE((e.kind == "admit" && e.agent == 2));
    }
    CHECK(admitted);
    CHECK(rejected);
    CHECK(tr.final_agents[0].role == Role::Layer);
    CHECK(tr.final_agents[1].role == Role::Free);
    CHECK(tr.final_agents[1].target_layer == 0);
  }

  TEST_CASE("determinism") {
    const Scenario s = small_multi();
    const SimulationTrace a = run(s, Mode::multi_layer);
    const SimulationTrace b = run(s, Mode::multi_layer);
    CHECK(a.hash() == b.hash());
    Scenario other = s;
    other.seed = 8;
    CHECK(run(other, Mode::multi_layer).hash() != a.hash());
  }

  TEST_CASE("records and monitors") {
    const Scenario s = small_multi();
    const SimulationTrace tr = run(s, Mode::multi_layer);
    REQUIRE_FALSE(tr.failure);
    CHECK(tr.monitors.h_decreases == 0);
    CHECK(tr.monitors.conservation_ok);
    REQUIRE_FALSE(tr.rounds.empty());
    for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
      const RoundRecord& r = tr.rounds[i];
      CHECK(r.tick == static_cast<long>(i) + 1);
      REQUIRE(r.layer_p.size() == 2);
      CHECK(r.p == total_detection_probability(r.layer_p));
      for (double p : r.layer_p) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
      }
    }
    for (const AgentRecord& a : tr.agents) {
      CHECK(((a.tick % s.agent_stride) == 0 || a.tick == static_cast<long>(tr.rounds.size())));
      CHECK(a.division.has_value() == (a.role == Role::Layer));
    }
    int working = 0;
    for (const AgentState& a : tr.final_agents) working += a.role == Role::Layer ? 1 : 0;
    CHECK(working > 0);
  }

  TEST_CASE("single-layer mode") {
    Scenario s = small_multi(6);
    s.mode = Mode::single_layer;
    const SimulationTrace tr = run(s, Mode::single_layer);
    REQUIRE_FALSE(tr.failure);
    CHECK(tr.layer_count == 1);
    for (const RoundRecord& r : tr.rounds) {
      REQUIRE(r.layer_p.size() == 1);
      CHECK(r.p == r.layer_p[0]);
    }
    for (const AgentState& a : tr.final_agents) {
      CHECK(a.role == Role::Layer);
      CHECK(a.target_layer == 1);
    }
    CHECK(tr.monitors.h_decreases == 0);
  }

  TEST_CASE("mode both runs single-layer first") {
    Scenario s = small_multi(4);
    s.mode = Mode::both;
    s.horizon = 1.0;
    const auto traces = run_all(s);
    REQUIRE(traces.size() == 2);
    CHECK(traces[0].mode == Mode::single_layer);
    CHECK(traces[1].mode == Mode::multi_layer);
    CHECK_THROWS_AS(run(s, Mode::both), std::invalid_argument);
  }

  TEST_CASE("convergence stop") {
    Scenario s;
    s.layers = {CircleSpec{1.0}};
    s.grid_cells = 256;
    s.density.kind = DensitySpec::Kind::uniform;
    s.agent_count = 3;
    s.init.kind = InitSpec::Kind::explicit_positions;
    s.init.positions = {{1.0, 0.0}, {std::cos(2.0), std::sin(2.0)}, {std::cos(4.2), std::sin(4.2)}};
    s.gains = {1.0, 2.0, 2.0};
    s.dt = 0.05;
    s.horizon = 500.0;
    s.mode = Mode::single_layer;
    const SimulationTrace tr = run(s, Mode::single_layer);
    REQUIRE_FALSE(tr.failure);
    CHECK(tr.converged);
    CHECK(tr.rounds.size() < static_cast<std::size_t>(s.rounds()));
    CHECK(tr.monitors.length_bounds_checked);
    CHECK(tr.monitors.length_bounds_ok);
    CHECK(tr.events.back().kind == "converged");
    CHECK(tr.agents.back().tick == static_cast<long>(tr.rounds.size()));
  }

  TEST_CASE("breaches stop the run") {
    Scenario s = small_multi(6);
    s.mode = Mode::single_layer;
    s.gains.kappa_omega = 1e5;
    s.dt = 0.5;
    const SimulationTrace tr = run(s, Mode::single_layer);
    REQUIRE(tr.failure);
    CHECK_FALSE(tr.failure->message.empty());
    CHECK(tr.rounds.size() < static_cast<std::size_t>(s.rounds()));
    bool breach_event = false;
    for (const Event& e : tr.events) breach_event = breach_event || e.kind == "breach";
    CHECK(breach_event);
  }
}
