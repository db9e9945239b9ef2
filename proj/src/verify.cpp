#include "ringcover/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "ringcover/io.hpp"
#include "ringcover/random.hpp"

namespace ringcover {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Integrates g(arc, rho) over the ccw arc from `start`, splitting at `breaks`.
template <class G>
double integrate_scalar(const LayerField& field, Phase start, double width,
                        std::initializer_list<Phase> breaks, G&& g) {
  const LayerCurve& c = field.curve();
  auto make = [&](double, double) {
    return [&](double theta, int m) {
      if (m >= 0) return g(c.arc_half(m), field.rho_half(m));
      return g(c.arc_at(theta), field.density().density(theta));
    };
  };
  return field.integrate_pieces<double>(start, width, breaks, make);
}

double arc_distance(double a, double b, double total) {
  double u = std::fmod(std::abs(a - b), total);
  return std::min(u, total - u);
}

// Members of `assembly` in phase order with ids, phases and divisions copied.
std::vector<Member> copy_members(const LayerAssembly& assembly) { return assembly.members(); }

}  // namespace

GradientCheck fd_gradient_check(const LayerAssembly& assembly, std::size_t idx, double step) {
  if (!(step >= 1e-7 && step <= 1e-3)) throw std::invalid_argument("step must lie in [1e-7, 1e-3]");
  const LayerField& field = assembly.field();
  const Member& m = assembly.at(idx);
  const Phase start = assembly.segment_start(idx);
  const double width = assembly.segment_width(idx);
  GradientCheck g;
  g.analytic = field.integrate(m.phase, start, width).gradient;
  const double up = field.coverage(m.phase + step, start, width);
  const double down = field.coverage(m.phase - step, start, width);
  g.numeric = (up - down) / (2.0 * step);
  g.abs_error = std::abs(g.analytic - g.numeric);
  const double scale = std::max(std::abs(g.analytic), std::abs(g.numeric));
  g.rel_error = scale > 0.0 ? g.abs_error / scale : 0.0;
  return g;
}

GridOptimum brute_force_optimum(const LayerField& field, int n, int grid) {
  if (n < 1 || n > 5) throw std::invalid_argument("brute force needs 1 to 5 agents");
  if (grid < 64) throw std::invalid_argument("brute force grid must have at least 64 points");
  const LayerCurve& curve = field.curve();
  const bool symmetric =
      curve.is_circle() && field.density().kind() == DensityModel::Kind::uniform;
  if (!symmetric && n > 3) {
    throw std::invalid_argument("without rotational symmetry brute force is limited to 3 agents");
  }
  auto at = [grid](int j) { return Phase(kTwoPi * j / grid); };

  GridOptimum best;
  best.symmetric = symmetric;
  best.value = -1.0;
  if (n == 1) {
    const int last = symmetric ? 0 : grid - 1;
    for (int j = 0; j <= last; ++j) {
      const double v = field.coverage(at(j), at(j) + kPi, kTwoPi);
      ++best.evaluated;
      if (v > best.value) {
        best.value = v;
        best.phases = {at(j)};
      }
    }
    return best;
  }

  // pair(a, gap): what the agents at a and a + gap collect between them, each
  // up to the geodesic midpoint
  auto pair_value = [&](int a, int gap) {
    const Phase pa = at(a);
    const Phase pb = at((a + gap) % grid);
    const Phase mid = curve.arc_midpoint(pa, pb);
    return field.coverage(pa, pa, ccw_gap(mid, pa)) + field.coverage(pb, mid, ccw_gap(pb, mid));
  };
  const int rows = symmetric ? 1 : grid;
  std::vector<double> table(static_cast<std::size_t>(rows) * static_cast<std::size_t>(grid), 0.0);
  for (int a = 0; a < rows; ++a) {
    for (int gap = 1; gap < grid; ++gap) {
      table[static_cast<std::size_t>(a) * grid + gap] = pair_value(a, gap);
    }
  }
  auto pair = [&](int a, int b) {
    const int gap = ((b - a) % grid + grid) % grid;
    const int row = symmetric ? 0 : a;
    return table[static_cast<std::size_t>(row) * grid + gap];
  };

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::function<void(int, int, double)> search = [&](int depth, int from, double partial) {
    if (depth == n) {
      const double v = partial + pair(idx.back(), idx.front());
      ++best.evaluated;
      if (v > best.value) {
        best.value = v;
        best.phases.clear();
        for (int j : idx) best.phases.push_back(at(j));
      }
      return;
    }
    for (int j = from; j <= grid - (n - depth); ++j) {
      idx[static_cast<std::size_t>(depth)] = j;
      const double add = depth == 0 ? 0.0 : pair(idx[static_cast<std::size_t>(depth - 1)], j);
      search(depth + 1, j + 1, partial + add);
    }
  };
  if (symmetric) {
    idx[0] = 0;
    search(1, 1, 0.0);
  } else {
    search(0, 0, 0.0);
  }
  return best;
}

double corollary_radius_bound(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  return std::sqrt(2.0) * gamma / kTwoPi;
}

double lemma6_reduction_bound(const LayerAssembly& assembly, std::size_t idx) {
  if (assembly.size() < 2) throw std::invalid_argument("the reduction bound needs two members");
  const LayerField& field = assembly.field();
  const LayerCurve& c = field.curve();
  const SensingModel& f = field.sensing();
  const double total = c.total_length();
  const Member& m = assembly.at(idx);
  const Phase s_i = m.division;
  const Phase s_beta = assembly.segment_end(idx);
  const double arc_phi = c.arc_at(m.phase);

  auto term = [&](Phase from, double width, Phase anchor) {
    const double arc_anchor = c.arc_at(anchor);
    const double offset = arc_distance(arc_anchor, arc_phi, total);
    return integrate_scalar(
        field, from, width, {m.phase, c.antipode(m.phase), c.antipode(anchor)},
        [&](double arc, double rho) {
          return (f.detect_prob(arc_distance(arc_phi, arc, total)) -
                  f.detect_prob(offset + arc_distance(arc_anchor, arc, total))) *
                 rho;
        });
  };
  return term(s_i, ccw_gap(m.phase, s_i), s_i) + term(m.phase, ccw_gap(s_beta, m.phase), s_beta);
}

double lemma7_increase_bound(const LayerAssembly& assembly, Phase entering) {
  const LayerField& field = assembly.field();
  if (assembly.empty()) return field.coverage(entering, entering + kPi, kTwoPi);
  const LayerCurve& c = field.curve();
  std::size_t a = 0;
  std::size_t b = 0;
  for (std::size_t j = 0; j < assembly.size(); ++j) {
    const Phase p = assembly.at(j).phase;
    if (p == entering) throw std::invalid_argument("entering phase is occupied");
    if (ccw_gap(entering, p) < ccw_gap(entering, assembly.at(a).phase)) a = j;
    if (ccw_gap(p, entering) < ccw_gap(assembly.at(b).phase, entering)) b = j;
  }
  const Phase phi_a = assembly.at(a).phase;
  const Phase phi_b = assembly.at(b).phase;
  const Phase s_i = c.arc_midpoint(phi_a, entering);
  const Phase s_beta = c.arc_midpoint(entering, phi_b);
  const Phase s_star = assembly.at(b).division;
  if (ccw_gap(s_star, s_i) > ccw_gap(s_beta, s_i)) {
    throw std::invalid_argument("the displaced division point lies outside the new segment");
  }
  return field.coverage(entering, s_i, ccw_gap(s_beta, s_i)) -
         field.coverage(phi_b, s_star, ccw_gap(s_beta, s_star)) -
         field.coverage(phi_a, s_i, ccw_gap(s_star, s_i));
}

TransferVerdict theorem2_transfer_beneficial(double p_k, double p_v, double p_k_prime,
                                             double p_v_prime) {
  for (double p : {p_k, p_v, p_k_prime, p_v_prime}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  TransferVerdict v;
  const double denom = 1.0 - p_v - p_v_prime;
  if (denom <= 0.0) {
    v.degenerate = true;
    v.beneficial = true;
    return v;
  }
  v.beneficial = p_k_prime < (1.0 - p_k) * p_v_prime / denom;
  return v;
}

LayerAssembly depart(const LayerAssembly& assembly, std::size_t idx) {
  std::vector<Member> ms = copy_members(assembly);
  const Phase leaver = ms.at(idx).phase;
  const std::size_t next = assembly.beta(idx);
  ms[next].division = leaver;
  ms.erase(ms.begin() + static_cast<std::ptrdiff_t>(idx));
  if (ms.size() == 1) ms[0].division = ms[0].phase + kPi;
  return LayerAssembly(assembly.field(), std::move(ms));
}

LayerAssembly enter(const LayerAssembly& assembly, int id, Phase phase) {
  const LayerCurve& c = assembly.curve();
  std::vector<Member> ms = copy_members(assembly);
  if (ms.empty()) {
    ms.push_back({id, phase, phase + kPi, c.radius(phase)});
    return LayerAssembly(assembly.field(), std::move(ms));
  }
  std::size_t a = 0;
  std::size_t b = 0;
  for (std::size_t j = 0; j < ms.size(); ++j) {
    if (ccw_gap(phase, ms[j].phase) < ccw_gap(phase, ms[a].phase)) a = j;
    if (ccw_gap(ms[j].phase, phase) < ccw_gap(ms[b].phase, phase)) b = j;
  }
  ms[b].division = c.arc_midpoint(phase, ms[b].phase);
  ms.push_back({id, phase, c.arc_midpoint(ms[a].phase, phase), c.radius(phase)});
  return LayerAssembly(assembly.field(), std::move(ms));
}

ConvergeResult converge(LayerAssembly& assembly, const Gains& gains, double dt, int max_steps,
                        double gradient_tol) {
  ConvergeResult r;
  double previous = coverage_quality(assembly);
  for (; r.steps < max_steps; ++r.steps) {
    const StepReport report = step_single_layer(assembly, gains, dt);
    const double now = coverage_quality(assembly);
    r.worst_drop = std::max(r.worst_drop, previous - now);
    previous = now;
    if (report.max_abs_gradient < gradient_tol) break;
  }
  if (gains.snap_midpoints && assembly.size() > 1) assembly.set_midpoint_divisions();
  r.coverage = coverage_quality(assembly);
  for (std::size_t i = 0; i < assembly.size(); ++i) {
    r.max_abs_gradient = std::max(r.max_abs_gradient, std::abs(integrate_segment(assembly, i).gradient));
  }
  return r;
}

// ---------------------------------------------------------------------------
// suites

const SimulationTrace& cached_run(const json& scenario_doc) {
  static std::mutex mu;
  static std::map<std::string, SimulationTrace> cache;
  const std::string key = scenario_doc.dump();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const Scenario s = scenario_from_json(scenario_doc);
  SimulationTrace t = run(s, s.mode == Mode::both ? Mode::multi_layer : s.mode);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(t)).first->second;
}

namespace {

constexpr double kGradientRelTol = 1e-4;
constexpr double kGradientFloor = 1e-8;
constexpr double kGradientStep = 1e-5;
// Finite differences of H need ~1e-11 absolute accuracy where the gradient is
// small; 4096 cells leave ~5e-11 of noise on the frequency-40 layer.
constexpr int kGradientGridCells = 16384;
constexpr double kMidpointGradientTol = 1e-6;
constexpr double kOptimalityTol = 1e-12;
constexpr int kPerturbations = 1000;
constexpr double kTerminalGradientTol = 1e-4;
constexpr double kCorollaryValueTol = 1e-3;
constexpr double kCorollarySpacingTol = 1e-2;
constexpr int kCorollaryGrid = 256;
constexpr double kBoundTol = 1e-6;

CurveSpec eq22_layer(int k) {
  static const double base[] = {1.0, 2.0, 3.0};
  static const double freq[] = {4.0, 10.0, 40.0};
  return SinusoidSpec{base[k - 1], 0.15, freq[k - 1]};
}

std::vector<double> random_phases(SeededRng& rng, int n, double min_sep) {
  for (;;) {
    std::vector<double> p;
    for (int i = 0; i < n; ++i) p.push_back(kTwoPi * rng.unit());
    std::sort(p.begin(), p.end());
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const double next = i + 1 < n ? p[static_cast<std::size_t>(i + 1)] : p[0] + kTwoPi;
      if (next - p[static_cast<std::size_t>(i)] < min_sep) ok = false;
    }
    if (ok) return p;
  }
}

// Single-layer scenario with agents placed on the curve at `phases`.
Scenario on_curve_scenario(const CurveSpec& curve, DensitySpec::Kind density, int grid_cells,
                           const std::vector<double>& phases) {
  Scenario s;
  s.mode = Mode::single_layer;
  s.layers = {curve};
  s.grid_cells = grid_cells;
  s.density.kind = density;
  s.agent_count = static_cast<int>(phases.size());
  s.init.kind = InitSpec::Kind::explicit_positions;
  const LayerCurve c = LayerCurve::from_spec(curve, grid_cells);
  for (double p : phases) s.init.positions.emplace_back(c.radius(p) * std::cos(p), c.radius(p) * std::sin(p));
  s.horizon = 1.0;
  return s;
}

std::vector<Phase> init_phases(const Scenario& s) {
  std::vector<Phase> out;
  for (const auto& [x, y] : s.init.positions) out.push_back(phase_of(x, y));
  return out;
}

LayerAssembly assembly_at(const LayerField& field, const std::vector<Phase>& phases,
                          const json* divisions = nullptr) {
  std::vector<Member> ms;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    ms.push_back({static_cast<int>(i) + 1, phases[i], phases[i] + kPi,
                  field.curve().radius(phases[i])});
  }
  LayerAssembly as(field, std::move(ms));
  if (divisions == nullptr) {
    as.set_midpoint_divisions();
  } else {
    for (std::size_t i = 0; i < as.size(); ++i) {
      as.at(i).division = Phase(divisions->at(static_cast<std::size_t>(as.at(i).id - 1)).get<double>());
    }
  }
  return as;
}

CheckOutcome check_gradient(const json& fx) {
  const Scenario s = scenario_from_json(fx.at("scenario"));
  const std::vector<LayerField> fields = s.build_fields();
  const json divisions = fx.at("divisions");
  const LayerAssembly as = assembly_at(fields[0], init_phases(s), &divisions);
  const double step = fx.value("step", kGradientStep);
  CheckOutcome out;
  double worst_rel = 0.0;
  double worst_abs = 0.0;
  double largest = 0.0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    const GradientCheck g = fd_gradient_check(as, i, step);
    largest = std::max(largest, std::abs(g.analytic));
    worst_abs = std::max(worst_abs, g.abs_error);
    if (std::max(std::abs(g.analytic), std::abs(g.numeric)) < kGradientFloor) {
      if (g.abs_error >= kGradientFloor) out.passed = false;
      continue;
    }
    worst_rel = std::max(worst_rel, g.rel_error);
    if (g.rel_error > kGradientRelTol) {
      out.passed = false;
      out.detail = "agent " + std::to_string(as.at(i).id) + " analytic " + format_double(g.analytic) +
                   " numeric " + format_double(g.numeric);
    }
  }
  out.values = {{"agents", static_cast<double>(as.size())},
                {"max_rel_error", worst_rel},
                {"max_abs_error", worst_abs},
                {"max_abs_gradient", largest}};
  return out;
}

CheckOutcome check_lemma1(const json& fx) {
  const Scenario s = scenario_from_json(fx.at("scenario"));
  const std::vector<LayerField> fields = s.build_fields();
  const LayerAssembly mid = assembly_at(fields[0], init_phases(s));
  const LayerCurve& c = mid.curve();
  const double total = c.total_length();
  const double h_mid = coverage_quality(mid);
  CheckOutcome out;
  double worst_ds = 0.0;
  for (const Member& m : mid.members()) {
    worst_ds = std::max(worst_ds, std::abs(division_point_gradient(mid, m.id)));
  }
  if (worst_ds >= kMidpointGradientTol) {
    out.passed = false;
    out.detail = "division-point gradient " + format_double(worst_ds) + " at the midpoints";
  }
  SeededRng rng(fx.at("perturbation_seed").get<std::uint64_t>());
  const int count = fx.value("perturbations", kPerturbations);
  double worst_margin = 1.0;
  for (int p = 0; p < count; ++p) {
    LayerAssembly moved = mid;
    // half the draws roam the whole gap, half stay near the midpoint
    const double spread = p % 2 == 0 ? 0.49 : 0.02;
    for (std::size_t i = 0; i < moved.size(); ++i) {
      const Phase from = moved.at(moved.alpha(i)).phase;
      const Phase to = moved.at(i).phase;
      const double gap = moved.size() == 1 ? total : c.arc_length_between(from, to);
      const double u = 0.5 + spread * (2.0 * rng.unit() - 1.0);
      moved.at(i).division = c.phase_at_arc(std::fmod(c.arc_at(from) + u * gap, total));
    }
    if (moved.size() == 1) continue;
    const double margin = h_mid - coverage_quality(moved);
    worst_margin = std::min(worst_margin, margin);
    if (margin < -kOptimalityTol) {
      out.passed = false;
      out.detail = "perturbation " + std::to_string(p) + " beats the midpoints by " + format_double(-margin);
    }
  }
  out.values = {{"agents", static_cast<double>(mid.size())},
                {"max_abs_ds_gradient", worst_ds},
                {"h_midpoints", h_mid},
                {"worst_margin", worst_margin}};
  return out;
}

double terminal_gradient(const Scenario& s, const SimulationTrace& t, int layer) {
  const std::vector<LayerField> fields = s.build_fields();
  std::vector<Member> ms;
  for (const AgentState& a : t.final_agents) {
    if (a.role == Role::Layer && a.target_layer == layer) {
      ms.push_back({a.id, a.phase, a.division.value_or(a.phase + kPi), a.radius});
    }
  }
  const LayerAssembly as(fields[static_cast<std::size_t>(layer - 1)], std::move(ms));
  double g = 0.0;
  for (std::size_t i = 0; i < as.size(); ++i) g = std::max(g, std::abs(integrate_segment(as, i).gradient));
  return g;
}

CheckOutcome check_theorem1(const json& fx) {
  const Scenario s = scenario_from_json(fx.at("scenario"));
  const SimulationTrace& t = cached_run(fx.at("scenario"));
  CheckOutcome out;
  const double grad = terminal_gradient(s, t, 1);
  out.passed = !t.failure && t.monitors.h_decreases == 0 && grad < kTerminalGradientTol;
  if (t.failure) out.detail = t.failure->message;
  else if (t.monitors.h_decreases > 0) out.detail = std::to_string(t.monitors.h_decreases) + " decreases of H";
  else if (grad >= kTerminalGradientTol) out.detail = "terminal gradient " + format_double(grad);
  out.values = {{"rounds", static_cast<double>(t.rounds.size())},
                {"h_decreases", static_cast<double>(t.monitors.h_decreases)},
                {"worst_h_drop", t.monitors.worst_h_drop},
                {"terminal_max_gradient", grad},
                {"final_h", t.rounds.empty() ? 0.0 : t.rounds.back().layer_h.at(0)}};
  return out;
}

CheckOutcome check_collisions(const json& fx) {
  const SimulationTrace& t = cached_run(fx.at("scenario"));
  CheckOutcome out;
  out.passed = !t.failure && t.monitors.min_gap > 0.0;
  if (t.failure) out.detail = "tick " + std::to_string(t.failure->tick) + ": " + t.failure->message;
  out.values = {{"rounds", static_cast<double>(t.rounds.size())},
                {"min_gap", t.monitors.min_gap},
                {"failed", t.failure ? 1.0 : 0.0}};
  return out;
}

CheckOutcome check_bounds(const json& fx) {
  const Scenario s = scenario_from_json(fx.at("scenario"));
  const SimulationTrace& t = cached_run(fx.at("scenario"));
  const std::vector<LayerField> fields = s.build_fields();
  std::vector<Member> ms;
  for (const AgentState& a : t.final_agents) {
    if (a.role == Role::Layer && a.target_layer == 1) {
      ms.push_back({a.id, a.phase, a.division.value_or(a.phase + kPi), a.radius});
    }
  }
  const LayerAssembly as(fields[0], std::move(ms));
  const LengthBounds b = check_length_bounds(as);
  // settled: either the engine's stop fired (and its own bound check ran) or
  // the horizon ended with every gradient below the terminal tolerance
  const double grad = terminal_gradient(s, t, 1);
  const bool settled = t.converged || grad < kTerminalGradientTol;
  CheckOutcome out;
  out.passed = !t.failure && settled && b.ok && (!t.monitors.length_bounds_checked || t.monitors.length_bounds_ok);
  if (!settled) out.detail = "not settled at the horizon, gradient " + format_double(grad);
  else if (!b.ok || !t.monitors.length_bounds_ok) out.detail = "bounds violated " + t.monitors.length_bounds_detail;
  const double n = static_cast<double>(as.size());
  out.values = {{"agents", n},
                {"converged", t.converged ? 1.0 : 0.0},
                {"terminal_max_gradient", grad},
                {"min_over_mean", b.min_length / (b.total / n)},
                {"max_over_mean", b.max_length / (b.total / n)},
                {"max_over_half", b.max_length / (0.5 * b.total)}};
  return out;
}

CheckOutcome check_corollary(const json& fx) {
  const Scenario s = scenario_from_json(fx.at("scenario"));
  const std::vector<LayerField> fields = s.build_fields();
  const int grid = fx.value("grid", kCorollaryGrid);
  const GridOptimum best = brute_force_optimum(fields[0], s.agent_count, grid);
  const SimulationTrace& t = cached_run(fx.at("scenario"));
  CheckOutcome out;
  std::vector<double> phases;
  for (const AgentState& a : t.final_agents) phases.push_back(a.phase.value());
  std::sort(phases.begin(), phases.end());
  const double ideal = kTwoPi / static_cast<double>(phases.size());
  double spacing_err = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double next = i + 1 < phases.size() ? phases[i + 1] : phases[0] + kTwoPi;
    spacing_err = std::max(spacing_err, std::abs(next - phases[i] - ideal));
  }
  const double h = t.rounds.empty() ? 0.0 : t.rounds.back().layer_h.at(0);
  const double radius = std::get<CircleSpec>(s.layers[0]).radius;
  out.passed = !t.failure && std::abs(h - best.value) <= kCorollaryValueTol &&
               spacing_err <= kCorollarySpacingTol && radius <= corollary_radius_bound(s.gamma);
  if (!out.passed) {
    out.detail = "H " + format_double(h) + " grid optimum " + format_double(best.value) +
                 " spacing error " + format_double(spacing_err);
  }
  out.values = {{"agents", static_cast<double>(s.agent_count)},
                {"h_simulated", h},
                {"h_grid", best.value},
                {"abs_diff", std::abs(h - best.value)},
                {"spacing_error", spacing_err},
                {"radius_bound", corollary_radius_bound(s.gamma)},
                {"converged", t.converged ? 1.0 : 0.0}};
  return out;
}

Gains settle_gains() {
  Gains g;
  g.kappa_omega = 10.0;
  g.kappa_r = 0.0;
  g.snap_midpoints = true;
  return g;
}
constexpr double kSettleDt = 0.05;
constexpr int kSettleSteps = 20000;
constexpr double kSettleGradient = 1e-7;

CheckOutcome check_theorem2(const json& fx) {
  const Scenario s = scenario_from_json(fx.at("scenario"));
  const std::vector<LayerField> fields = s.build_fields();
  const int from = fx.at("from_layer").get<int>();
  const int to = fx.at("to_layer").get<int>();
  auto phases_of = [](const json& arr) {
    std::vector<Phase> out;
    for (const json& v : arr) out.emplace_back(v.get<double>());
    return out;
  };
  LayerAssembly k_layer = assembly_at(fields[static_cast<std::size_t>(from - 1)], phases_of(fx.at("from_phases")));
  LayerAssembly v_layer(fields[static_cast<std::size_t>(to - 1)], {});
  const std::vector<Phase> v_phases = phases_of(fx.at("to_phases"));
  if (!v_phases.empty()) v_layer = assembly_at(fields[static_cast<std::size_t>(to - 1)], v_phases);
  const Gains gains = settle_gains();
  converge(k_layer, gains, kSettleDt, kSettleSteps, kSettleGradient);
  if (!v_layer.empty()) converge(v_layer, gains, kSettleDt, kSettleSteps, kSettleGradient);

  const std::size_t idx = k_layer.index_of(fx.at("mover").get<int>());
  const Phase phi = k_layer.at(idx).phase;
  const double p_k = coverage_quality(k_layer);
  const double p_v = coverage_quality(v_layer);
  const double p_k_prime = lemma6_reduction_bound(k_layer, idx);
  const double p_v_prime = lemma7_increase_bound(v_layer, phi);
  const TransferVerdict verdict = theorem2_transfer_beneficial(
      std::clamp(p_k, 0.0, 1.0), std::clamp(p_v, 0.0, 1.0), std::clamp(p_k_prime, 0.0, 1.0),
      std::clamp(p_v_prime, 0.0, 1.0));

  LayerAssembly k_after = depart(k_layer, idx);
  LayerAssembly v_after = enter(v_layer, 1000, phi);
  const double dk_now = coverage_quality(k_after) - p_k;
  const double dv_now = coverage_quality(v_after) - p_v;
  converge(k_after, gains, kSettleDt, kSettleSteps, kSettleGradient);
  converge(v_after, gains, kSettleDt, kSettleSteps, kSettleGradient);
  const double dk_settled = coverage_quality(k_after) - p_k;
  const double dv_settled = coverage_quality(v_after) - p_v;

  const double before = 1.0 - (1.0 - p_k) * (1.0 - p_v);
  const double after = 1.0 - (1.0 - p_k - dk_settled) * (1.0 - p_v - dv_settled);
  CheckOutcome out;
  std::ostringstream why;
  if (dk_now < -p_k_prime - kBoundTol || dk_settled < -p_k_prime - kBoundTol) why << "departure exceeds its bound; ";
  if (dv_now < p_v_prime - kBoundTol || dv_settled < p_v_prime - kBoundTol) why << "arrival falls short of its bound; ";
  if (verdict.beneficial && after < before - kBoundTol) why << "beneficial transfer lowered P; ";
  out.detail = why.str();
  out.passed = out.detail.empty();
  out.values = {{"p_k", p_k},
                {"p_v", p_v},
                {"p_k_prime", p_k_prime},
                {"p_v_prime", p_v_prime},
                {"dk_immediate", dk_now},
                {"dk_settled", dk_settled},
                {"dv_immediate", dv_now},
                {"dv_settled", dv_settled},
                {"beneficial", verdict.beneficial ? 1.0 : 0.0},
                {"degenerate", verdict.degenerate ? 1.0 : 0.0},
                {"p_before", before},
                {"p_after", after}};
  return out;
}

using Check = CheckOutcome (*)(const json&);

const std::map<std::string, Check>& checks() {
  static const std::map<std::string, Check> table = {
      {"gradient", check_gradient},   {"lemma1", check_lemma1},       {"theorem1", check_theorem1},
      {"collisions", check_collisions}, {"bounds", check_bounds},     {"corollary", check_corollary},
      {"theorem2", check_theorem2}};
  return table;
}

json fixture(const std::string& suite, const Scenario& s) {
  return {{"suite", suite}, {"scenario", scenario_to_json(s)}};
}

std::vector<json> gradient_fixtures() {
  SeededRng rng(101);
  std::vector<json> out;
  for (int f = 0; f < 100; ++f) {
    const int n = rng.integer(3, 8);
    const CurveSpec curve = f % 2 == 0 ? CurveSpec{CircleSpec{rng.uniform(0.5, 2.0)}} : eq22_layer(1 + (f / 2) % 3);
    const auto density = f % 4 < 2 ? DensitySpec::Kind::linear_phase : DensitySpec::Kind::uniform;
    const std::vector<double> phases = random_phases(rng, n, 0.05);
    json fx = fixture("gradient", on_curve_scenario(curve, density, kGradientGridCells, phases));
    // division points anywhere inside the gap to the clockwise neighbour
    json divisions = json::array();
    for (int i = 0; i < n; ++i) {
      const double prev = i == 0 ? phases.back() - kTwoPi : phases[static_cast<std::size_t>(i - 1)];
      const double here = phases[static_cast<std::size_t>(i)];
      divisions.push_back(wrap_angle(prev + rng.uniform(0.1, 0.9) * (here - prev)));
    }
    fx["divisions"] = divisions;
    fx["step"] = kGradientStep;
    out.push_back(fx);
  }
  return out;
}

std::vector<json> lemma1_fixtures() {
  SeededRng rng(202);
  std::vector<json> out;
  for (int f = 0; f < 20; ++f) {
    const int n = rng.integer(2, 8);
    const CurveSpec curve = f % 2 == 0 ? CurveSpec{CircleSpec{rng.uniform(0.5, 2.0)}} : eq22_layer(1 + (f / 2) % 3);
    const auto density = f % 3 == 0 ? DensitySpec::Kind::uniform : DensitySpec::Kind::linear_phase;
    json fx = fixture("lemma1", on_curve_scenario(curve, density, kDefaultGridCells, random_phases(rng, n, 0.05)));
    fx["perturbation_seed"] = 7000 + f;
    fx["perturbations"] = kPerturbations;
    out.push_back(fx);
  }
  return out;
}

// Gains for the long single-layer runs: the case-study gains would need hours
// of simulated time to settle at dt = 1e-3.
std::vector<json> single_layer_run_fixtures(const std::string& suite) {
  SeededRng rng(303);
  std::vector<json> out;
  for (int f = 0; f < 20; ++f) {
    const int n = rng.integer(3, 8);
    const CurveSpec curve = f % 2 == 0 ? CurveSpec{CircleSpec{rng.uniform(0.6, 1.5)}} : eq22_layer(1);
    const auto density = f % 4 < 2 ? DensitySpec::Kind::linear_phase : DensitySpec::Kind::uniform;
    Scenario s = on_curve_scenario(curve, density, 1024, random_phases(rng, n, 0.1));
    s.gains.kappa_omega = 20.0;
    s.gains.kappa_s = 5.0;
    s.gains.kappa_r = 1.0;
    s.dt = 1e-3;
    s.horizon = 60.0;
    s.agent_stride = 1000;
    out.push_back(fixture(suite, s));
  }
  return out;
}

std::vector<json> corollary_fixtures() {
  std::vector<json> out;
  SeededRng rng(404);
  for (int n = 2; n <= 4; ++n) {
    Scenario s = on_curve_scenario(CircleSpec{0.2}, DensitySpec::Kind::uniform, 1024, random_phases(rng, n, 0.3));
    s.gamma = 1.0;
    s.gains.kappa_omega = 200.0;
    s.gains.kappa_s = 20.0;
    s.gains.kappa_r = 1.0;
    s.dt = 0.01;
    s.horizon = 200.0;
    s.agent_stride = 100;
    json fx = fixture("corollary", s);
    fx["grid"] = kCorollaryGrid;
    out.push_back(fx);
  }
  return out;
}

std::vector<json> theorem2_fixtures() {
  SeededRng rng(505);
  std::vector<json> out;
  for (int f = 0; f < 50; ++f) {
    Scenario s;
    s.mode = Mode::multi_layer;
    if (f % 2 == 0) {
      s.layers = {eq22_layer(1), eq22_layer(2)};
    } else {
      const double r = rng.uniform(0.5, 1.0);
      s.layers = {CircleSpec{r}, CircleSpec{r + rng.uniform(0.3, 1.0)}};
    }
    s.grid_cells = 512;
    s.density.kind = f % 3 == 0 ? DensitySpec::Kind::uniform : DensitySpec::Kind::linear_phase;
    s.agent_count = 1;
    s.init.radius = 0.3;
    s.horizon = 1.0;
    const bool outward = f % 4 < 2;
    // the first half moves an agent onto a layer with at most one member,
    // where transfers tend to pay off
    const bool sparse = f < 25;
    const int n_from = sparse ? rng.integer(2, 5) : rng.integer(2, 7);
    const int n_to = sparse ? rng.integer(0, 1) : rng.integer(0, 5);
    json fx = fixture("theorem2", s);
    fx["from_layer"] = outward ? 1 : 2;
    fx["to_layer"] = outward ? 2 : 1;
    fx["from_phases"] = random_phases(rng, n_from, 0.2);
    fx["to_phases"] = n_to == 0 ? json::array() : json(random_phases(rng, n_to, 0.2));
    fx["mover"] = rng.integer(1, n_from);
    out.push_back(fx);
  }
  return out;
}

std::vector<json> fixtures_for(const std::string& name) {
  if (name == "gradient") return gradient_fixtures();
  if (name == "lemma1") return lemma1_fixtures();
  if (name == "theorem1" || name == "bounds") return single_layer_run_fixtures(name);
  if (name == "collisions") {
    std::vector<json> out = single_layer_run_fixtures(name);
    out.push_back(fixture(name, case_study_scenario()));
    return out;
  }
  if (name == "corollary") return corollary_fixtures();
  if (name == "theorem2") return theorem2_fixtures();
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace

std::size_t SuiteResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const CheckOutcome& o) { return !o.passed; }));
}

std::vector<std::string> suite_names() {
  return {"gradient", "lemma1", "theorem1", "collisions", "bounds", "corollary", "theorem2"};
}

CheckOutcome replay_fixture(const json& fixture) {
  const std::string suite = fixture.at("suite").get<std::string>();
  auto it = checks().find(suite);
  if (it == checks().end()) throw std::invalid_argument("unknown suite '" + suite + "'");
  try {
    return it->second(fixture);
  } catch (const std::exception& e) {
    CheckOutcome out;
    out.passed = false;
    out.detail = std::string("error: ") + e.what();
    return out;
  }
}

SuiteResult run_suite(const std::string& name) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = name;
  r.fixtures = fixtures_for(name);
  for (const json& fx : r.fixtures) {
    r.outcomes.push_back(replay_fixture(fx));
    if (!r.outcomes.back().passed) r.passed = false;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void write_suite_outputs(const fs::path& dir, const SuiteResult& result) {
  fs::create_directories(dir);
  std::ofstream csv(dir / (result.name + ".csv"));
  std::vector<std::string> columns;
  for (const CheckOutcome& o : result.outcomes) {
    for (const auto& [k, v] : o.values) {
      (void)v;
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    }
  }
  csv << "fixture,passed";
  for (const std::string& c : columns) csv << ',' << c;
  csv << '\n';
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const CheckOutcome& o = result.outcomes[i];
    csv << i << ',' << (o.passed ? 1 : 0);
    for (const std::string& c : columns) {
      csv << ',';
      for (const auto& [k, v] : o.values) {
        if (k == c) csv << format_double(v);
      }
    }
    csv << '\n';
  }

  std::ofstream txt(dir / (result.name + ".txt"));
  txt << result.name << ": " << (result.passed ? "PASS" : "FAIL") << ", "
      << result.outcomes.size() - result.failures() << "/" << result.outcomes.size()
      << " fixtures passed in " << format_double(result.seconds) << " s\n";
  for (const std::string& n : result.notes) txt << "  " << n << '\n';
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const CheckOutcome& o = result.outcomes[i];
    if (o.passed) continue;
    const fs::path file = dir / "failures" / (result.name + "_" + std::to_string(i) + ".json");
    fs::create_directories(file.parent_path());
    std::ofstream(file) << result.fixtures[i].dump(2) << '\n';
    txt << "  fixture " << i << " failed: " << o.detail << " (replay: " << file.string() << ")\n";
  }
}

void write_verify_summary(const fs::path& dir, const std::vector<SuiteResult>& results) {
  fs::create_directories(dir);
  std::ofstream csv(dir / "summary.csv");
  csv << "suite,fixtures,failures,passed,seconds\n";
  for (const SuiteResult& r : results) {
    csv << r.name << ',' << r.outcomes.size() << ',' << r.failures() << ',' << (r.passed ? 1 : 0) << ','
        << format_double(r.seconds) << '\n';
  }
}

}  // namespace ringcover
