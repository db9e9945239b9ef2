// Prints one PASS/FAIL line per acceptance criterion. Pass criterion names
// (A1 ... A10) as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ringcover/engine.hpp"
#include "ringcover/io.hpp"
#include "ringcover/verify.hpp"

using namespace ringcover;
using nlohmann::json;

namespace {

constexpr double kA1SecondsMax = 30.0;
constexpr double kA6SecondsMax = 120.0;
constexpr double kA7FloorP = 0.999;
constexpr double kA7TargetP = 0.9999;
constexpr double kA7SecondsMax = 300.0;
constexpr double kA8SingleFloor = 0.99;
constexpr double kA8Slack = 1e-3;
constexpr double kA8Horizon = 2000.0;
constexpr double kA7ShortHorizon = 2000.0;
const std::vector<std::uint64_t> kA7ExtraSeeds = {1, 2};
const std::vector<int> kA8Counts = {10, 20, 30, 40, 50};

struct Line {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Line from_suite(const std::string& name, double seconds_max = 0.0) {
  const SuiteResult r = run_suite(name);
  Line l;
  l.passed = r.passed && (seconds_max <= 0.0 || r.seconds < seconds_max);
  std::ostringstream os;
  os << name << " " << r.outcomes.size() - r.failures() << "/" << r.outcomes.size() << " fixtures, "
     << fmt(r.seconds, 3) << " s";
  if (seconds_max > 0.0) os << " (limit " << fmt(seconds_max, 3) << " s)";
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    if (!r.outcomes[i].passed) {
      os << "; first failure #" << i << ": " << r.outcomes[i].detail;
      break;
    }
  }
  l.detail = os.str();
  return l;
}

struct TimedRun {
  const SimulationTrace* trace;
  double seconds;
};

// Wall time of the first, uncached, run of each scenario.
TimedRun timed_cached(const Scenario& s) {
  static std::map<std::string, double> seconds;
  const json doc = scenario_to_json(s);
  const std::string key = doc.dump();
  const auto t0 = std::chrono::steady_clock::now();
  const SimulationTrace& t = cached_run(doc);
  if (!seconds.count(key)) seconds[key] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {&t, seconds[key]};
}

long first_admit_tick(const SimulationTrace& t, int layer) {
  for (const Event& e : t.events) {
    if (e.kind == "admit" && e.layer == layer) return e.tick;
  }
  return -1;
}

// P just after the first admission to `layer` against the round before.
bool strict_step(const SimulationTrace& t, int layer, std::string& note) {
  const long tick = first_admit_tick(t, layer);
  if (tick < 2) {
    note += " layer " + std::to_string(layer) + " never populated;";
    return false;
  }
  const double before = t.rounds.at(static_cast<std::size_t>(tick - 2)).p;
  const double after = t.rounds.at(static_cast<std::size_t>(tick - 1)).p;
  note += " layer " + std::to_string(layer) + " at t=" + fmt(t.rounds.at(static_cast<std::size_t>(tick - 1)).t) +
          " P " + fmt(before, 8) + "->" + fmt(after, 8) + ";";
  return after > before;
}

Line a7() {
  const Scenario s = case_study_scenario();
  const TimedRun main = timed_cached(s);
  const SimulationTrace& t = *main.trace;
  Line l;
  std::string note;
  const bool clean = !t.failure;
  const bool target = t.final_p() >= kA7TargetP;
  const bool steps = strict_step(t, 2, note) && strict_step(t, 3, note);
  const bool fast = main.seconds < kA7SecondsMax;
  bool floors = t.final_p() >= kA7FloorP;
  std::string others;
  for (std::uint64_t seed : kA7ExtraSeeds) {
    Scenario o = s;
    o.seed = seed;
    o.horizon = kA7ShortHorizon;
    const SimulationTrace& ot = cached_run(scenario_to_json(o));
    floors = floors && !ot.failure && ot.final_p() >= kA7FloorP;
    others += " seed " + std::to_string(seed) + " at " + fmt(kA7ShortHorizon) + " s: P=" + fmt(ot.final_p(), 8) + ";";
  }
  l.passed = clean && target && steps && fast && floors;
  l.detail = "seed " + std::to_string(s.seed) + " P=" + fmt(t.final_p(), 10) + " (>= " + fmt(kA7TargetP) +
             "), " + fmt(main.seconds, 4) + " s (limit " + fmt(kA7SecondsMax) + ");" + others +
             " staircase:" + note + (clean ? "" : " failure: " + t.failure->message);
  return l;
}

Line a4() {
  const SimulationTrace& t = *timed_cached(case_study_scenario()).trace;
  const SuiteResult r = run_suite("collisions");
  Line l;
  l.passed = r.passed && !t.failure && t.monitors.min_gap > 0.0;
  double smallest = kTwoPi;
  for (const CheckOutcome& o : r.outcomes) {
    for (const auto& [k, v] : o.values) {
      if (k == "min_gap") smallest = std::min(smallest, v);
    }
  }
  l.detail = "collisions " + std::to_string(r.outcomes.size() - r.failures()) + "/" +
             std::to_string(r.outcomes.size()) + " runs clean, smallest gap " + fmt(smallest) +
             "; case-study run gap " + fmt(t.monitors.min_gap) + (t.failure ? ", failure: " + t.failure->message : "");
  return l;
}

Line a8() {
  Scenario base = case_study_scenario();
  base.horizon = kA8Horizon;
  Line l;
  l.passed = true;
  std::ostringstream os;
  for (int n : kA8Counts) {
    Scenario s = base;
    s.agent_count = n;
    s.mode = Mode::single_layer;
    const SimulationTrace& single = cached_run(scenario_to_json(s));
    s.mode = Mode::multi_layer;
    const SimulationTrace& multi = cached_run(scenario_to_json(s));
    const double ps = single.final_p();
    const double pm = multi.final_p();
    bool ok = !single.failure && !multi.failure && pm >= ps - kA8Slack;
    if (n == kA8Counts.back()) ok = ok && pm >= ps && ps >= kA8SingleFloor;
    l.passed = l.passed && ok;
    os << "N=" << n << " single " << fmt(ps, 8) << " multi " << fmt(pm, 8) << (ok ? "" : " FAIL") << "; ";
  }
  l.detail = os.str();
  return l;
}

Line a10() {
  Scenario s = case_study_scenario();
  s.horizon = 500.0;
  s.agent_stride = 10;
  const SimulationTrace first = run(s, Mode::multi_layer);
  const SimulationTrace second = run(s, Mode::multi_layer);
  const Scenario echoed = scenario_from_json(json::parse(scenario_to_json(s).dump()));
  const SimulationTrace third = run(echoed, Mode::multi_layer);
  Scenario single = s;
  single.mode = Mode::single_layer;
  const SimulationTrace s1 = run(single, Mode::single_layer);
  const SimulationTrace s2 = run(scenario_from_json(json::parse(scenario_to_json(single).dump())), Mode::single_layer);
  Line l;
  l.passed = first.hash() == second.hash() && first.hash() == third.hash() && s1.hash() == s2.hash() &&
             !first.agents.empty();
  char buf[128];
  std::snprintf(buf, sizeof buf, "multi %016llx/%016llx/%016llx, single %016llx/%016llx",
                static_cast<unsigned long long>(first.hash()), static_cast<unsigned long long>(second.hash()),
                static_cast<unsigned long long>(third.hash()), static_cast<unsigned long long>(s1.hash()),
                static_cast<unsigned long long>(s2.hash()));
  l.detail = buf;
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Line()>>> criteria = {
      {"A1", [] { return from_suite("gradient", kA1SecondsMax); }},
      {"A2", [] { return from_suite("lemma1"); }},
      {"A3", [] { return from_suite("theorem1"); }},
      {"A4", a4},
      {"A5", [] { return from_suite("bounds"); }},
      {"A6", [] { return from_suite("corollary", kA6SecondsMax); }},
      {"A7", a7},
      {"A8", a8},
      {"A9", [] { return from_suite("theorem2"); }},
      {"A10", a10},
  };
  std::set<std::string> wanted(argv + 1, argv + argc);
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    if (!wanted.empty() && !wanted.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Line l;
    try {
      l = fn();
    } catch (const std::exception& e) {
      l.passed = false;
      l.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1f s) %s\n", name.c_str(), l.passed ? "PASS" : "FAIL", secs, l.detail.c_str());
    std::fflush(stdout);
    all = all && l.passed;
  }
  return all ? 0 : 1;
}
