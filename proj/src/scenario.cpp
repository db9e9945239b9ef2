#include "ringcover/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace ringcover {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) {
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    throw std::invalid_argument("missing required key '" + std::string(key) + "' in " + where);
  }
  return obj.at(key);
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
T get_req(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

std::vector<std::pair<double, double>> get_pairs(const json& obj, const char* key,
                                                 const std::string& where) {
  const json& arr = require(obj, key, where);
  if (!arr.is_array()) throw std::invalid_argument(where + "." + key + " must be an array");
  std::vector<std::pair<double, double>> out;
  for (const json& p : arr) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw std::invalid_argument(where + "." + key + " entries must be [a, b] number pairs");
    }
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

json pairs_to_json(const std::vector<std::pair<double, double>>& pairs) {
  json arr = json::array();
  for (const auto& [a, b] : pairs) arr.push_back({a, b});
  return arr;
}

CurveSpec parse_curve(const json& obj, const std::string& where) {
  const auto type = get_req<std::string>(obj, "type", where);
  if (type == "circle") {
    check_keys(obj, {"type", "radius"}, where);
    return CircleSpec{get_req<double>(obj, "radius", where)};
  }
  if (type == "sinusoid") {
    check_keys(obj, {"type", "base", "amplitude", "frequency"}, where);
    return SinusoidSpec{get_req<double>(obj, "base", where), get_req<double>(obj, "amplitude", where),
                        get_req<double>(obj, "frequency", where)};
  }
  if (type == "table") {
    check_keys(obj, {"type", "samples"}, where);
    return TableSpec{get_pairs(obj, "samples", where)};
  }
  throw std::invalid_argument("unknown curve type '" + type + "' in " + where);
}

json curve_to_json(const CurveSpec& spec) {
  struct Visitor {
    json operator()(const CircleSpec& c) const { return {{"type", "circle"}, {"radius", c.radius}}; }
    json operator()(const SinusoidSpec& s) const {
      return {{"type", "sinusoid"}, {"base", s.base}, {"amplitude", s.amplitude}, {"frequency", s.frequency}};
    }
    json operator()(const TableSpec& t) const {
      return {{"type", "table"}, {"samples", pairs_to_json(t.samples)}};
    }
    json operator()(const CustomSpec& c) const {
      throw std::invalid_argument("custom curve '" + c.name + "' has no scenario form");
    }
  };
  return std::visit(Visitor{}, spec);
}

Mode parse_mode(const std::string& m) {
  if (m == "single_layer") return Mode::single_layer;
  if (m == "multi_layer") return Mode::multi_layer;
  if (m == "both") return Mode::both;
  throw std::invalid_argument("unknown mode '" + m + "'; expected single_layer, multi_layer or both");
}

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::single_layer:
      return "single_layer";
    case Mode::multi_layer:
      return "multi_layer";
    case Mode::both:
      return "both";
  }
  return "?";
}

long Scenario::rounds() const {
  const double ratio = horizon / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(ratio));
}

std::vector<LayerCurve> Scenario::build_curves() const {
  std::vector<LayerCurve> curves;
  curves.reserve(layers.size());
  for (const CurveSpec& spec : layers) curves.push_back(LayerCurve::from_spec(spec, grid_cells));
  std::vector<const LayerCurve*> ptrs;
  for (const LayerCurve& c : curves) ptrs.push_back(&c);
  check_nested(ptrs);
  return curves;
}

std::vector<LayerField> Scenario::build_fields() const {
  DensityModel rho = DensityModel::linear_phase();
  switch (density.kind) {
    case DensitySpec::Kind::uniform:
      rho = DensityModel::uniform();
      break;
    case DensitySpec::Kind::linear_phase:
      break;
    case DensitySpec::Kind::table:
      rho = DensityModel::table(density.samples);
      break;
  }
  rho = rho.normalized_copy();
  std::vector<LayerField> fields;
  for (LayerCurve& c : build_curves()) fields.emplace_back(std::move(c), gaussian_model(gamma), rho);
  return fields;
}

void Scenario::validate() const {
  if (layers.empty()) throw std::invalid_argument("'layers' must list at least one curve");
  if (grid_cells < 8) throw std::invalid_argument("'grid_cells' must be at least 8");
  if (!(gamma > 0.0)) throw std::invalid_argument("'sensing.gamma' must be positive");
  if (agent_count < 1) throw std::invalid_argument("'agents.count' must be at least 1");
  if (!(dt > 0.0)) throw std::invalid_argument("'dt' must be positive");
  if (!(horizon >= dt)) throw std::invalid_argument("'horizon' must be at least 'dt'");
  if (!(protocol.h > 0.0 && protocol.h < 1.0)) throw std::invalid_argument("'protocol.h' must be in (0, 1)");
  if (!(protocol.delta > 0.0)) throw std::invalid_argument("'protocol.delta' must be positive");
  if (!(protocol.patrol_margin > 0.0)) {
    throw std::invalid_argument("'protocol.patrol_margin' must be positive");
  }
  if (!(gains.epsilon > 0.0)) throw std::invalid_argument("'gains.epsilon' must be positive");
  if (gains.inner_iterations < 0) throw std::invalid_argument("'gains.inner_iterations' must be >= 0");
  if (agent_stride < 1) throw std::invalid_argument("'trace.agent_stride' must be at least 1");
  const std::vector<LayerCurve> curves = build_curves();
  if (init.kind == InitSpec::Kind::disk) {
    if (!(init.radius > 0.0 && init.radius < curves.front().min_radius())) {
      throw std::invalid_argument("'agents.init.radius' must be positive and inside the first layer");
    }
  } else {
    if (static_cast<int>(init.positions.size()) != agent_count) {
      throw std::invalid_argument("'agents.init.positions' must list exactly 'agents.count' points");
    }
  }
}

Scenario scenario_from_json(const json& doc) {
  const std::string top = "scenario";
  check_keys(doc,
             {"mode", "layers", "grid_cells", "sensing", "density", "agents", "gains", "protocol", "dt",
              "horizon", "seed", "convergence_stop", "trace"},
             top);
  Scenario s;
  s.mode = parse_mode(get_or<std::string>(doc, "mode", "multi_layer", top));

  const json& layers = require(doc, "layers", top);
  if (!layers.is_array()) throw std::invalid_argument("'layers' must be an array");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    s.layers.push_back(parse_curve(layers[k], "layers[" + std::to_string(k) + "]"));
  }
  s.grid_cells = get_or<int>(doc, "grid_cells", s.grid_cells, top);

  if (doc.contains("sensing")) {
    const json& sensing = doc.at("sensing");
    check_keys(sensing, {"type", "gamma"}, "sensing");
    const auto type = get_or<std::string>(sensing, "type", "gaussian", "sensing");
    if (type != "gaussian") throw std::invalid_argument("unknown sensing type '" + type + "'");
    s.gamma = get_or<double>(sensing, "gamma", s.gamma, "sensing");
  }

  if (doc.contains("density")) {
    const json& d = doc.at("density");
    std::string type;
    if (d.is_string()) {
      type = d.get<std::string>();
    } else {
      check_keys(d, {"type", "samples"}, "density");
      type = get_req<std::string>(d, "type", "density");
    }
    if (type == "uniform") {
      s.density.kind = DensitySpec::Kind::uniform;
    } else if (type == "linear_phase") {
      s.density.kind = DensitySpec::Kind::linear_phase;
    } else if (type == "table") {
      if (!d.is_object()) throw std::invalid_argument("table density needs 'samples'");
      s.density.kind = DensitySpec::Kind::table;
      s.density.samples = get_pairs(d, "samples", "density");
    } else {
      throw std::invalid_argument("unknown density type '" + type + "'");
    }
  }

  const json& agents = require(doc, "agents", top);
  check_keys(agents, {"count", "init"}, "agents");
  if (agents.contains("init")) {
    const json& init = agents.at("init");
    check_keys(init, {"type", "radius", "positions"}, "agents.init");
    const auto type = get_req<std::string>(init, "type", "agents.init");
    if (type == "disk") {
      s.init.kind = InitSpec::Kind::disk;
      s.init.radius = get_or<double>(init, "radius", s.init.radius, "agents.init");
    } else if (type == "explicit") {
      s.init.kind = InitSpec::Kind::explicit_positions;
      s.init.positions = get_pairs(init, "positions", "agents.init");
    } else {
      throw std::invalid_argument("unknown agents.init type '" + type + "'");
    }
  }
  if (s.init.kind == InitSpec::Kind::explicit_positions) {
    s.agent_count = get_or<int>(agents, "count", static_cast<int>(s.init.positions.size()), "agents");
  } else {
    s.agent_count = get_req<int>(agents, "count", "agents");
  }

  if (doc.contains("gains")) {
    const json& g = doc.at("gains");
    check_keys(g, {"kappa_r", "kappa_omega", "kappa_s", "epsilon", "inner_iterations", "snap_midpoints"},
               "gains");
    s.gains.kappa_r = get_or<double>(g, "kappa_r", s.gains.kappa_r, "gains");
    s.gains.kappa_omega = get_or<double>(g, "kappa_omega", s.gains.kappa_omega, "gains");
    s.gains.kappa_s = get_or<double>(g, "kappa_s", s.gains.kappa_s, "gains");
    s.gains.epsilon = get_or<double>(g, "epsilon", s.gains.epsilon, "gains");
    s.gains.inner_iterations = get_or<int>(g, "inner_iterations", s.gains.inner_iterations, "gains");
    s.gains.snap_midpoints = get_or<bool>(g, "snap_midpoints", s.gains.snap_midpoints, "gains");
  }
  if (doc.contains("protocol")) {
    const json& p = doc.at("protocol");
    check_keys(p, {"h", "delta", "omega0", "patrol_margin"}, "protocol");
    s.protocol.h = get_or<double>(p, "h", s.protocol.h, "protocol");
    s.protocol.delta = get_or<double>(p, "delta", s.protocol.delta, "protocol");
    s.protocol.omega0 = get_or<double>(p, "omega0", s.protocol.omega0, "protocol");
    // the patrol ring defaults to four band widths outside the last layer
    s.protocol.patrol_margin =
        get_or<double>(p, "patrol_margin", 4.0 * s.protocol.delta, "protocol");
  }
  s.dt = get_or<double>(doc, "dt", s.dt, top);
  s.horizon = get_req<double>(doc, "horizon", top);
  s.seed = get_or<std::uint64_t>(doc, "seed", s.seed, top);
  s.convergence_stop = get_or<bool>(doc, "convergence_stop", s.convergence_stop, top);
  if (doc.contains("trace")) {
    const json& t = doc.at("trace");
    check_keys(t, {"agent_stride"}, "trace");
    s.agent_stride = get_or<int>(t, "agent_stride", s.agent_stride, "trace");
  }
  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json layers = json::array();
  for (const CurveSpec& c : s.layers) layers.push_back(curve_to_json(c));
  json density;
  switch (s.density.kind) {
    case DensitySpec::Kind::uniform:
      density = {{"type", "uniform"}};
      break;
    case DensitySpec::Kind::linear_phase:
      density = {{"type", "linear_phase"}};
      break;
    case DensitySpec::Kind::table:
      density = {{"type", "table"}, {"samples", pairs_to_json(s.density.samples)}};
      break;
  }
  json init;
  if (s.init.kind == InitSpec::Kind::disk) {
    init = {{"type", "disk"}, {"radius", s.init.radius}};
  } else {
    init = {{"type", "explicit"}, {"positions", pairs_to_json(s.init.positions)}};
  }
  return {
      {"mode", mode_name(s.mode)},
      {"layers", layers},
      {"grid_cells", s.grid_cells},
      {"sensing", {{"type", "gaussian"}, {"gamma", s.gamma}}},
      {"density", density},
      {"agents", {{"count", s.agent_count}, {"init", init}}},
      {"gains",
       {{"kappa_r", s.gains.kappa_r},
        {"kappa_omega", s.gains.kappa_omega},
        {"kappa_s", s.gains.kappa_s},
        {"epsilon", s.gains.epsilon},
        {"inner_iterations", s.gains.inner_iterations},
        {"snap_midpoints", s.gains.snap_midpoints}}},
      {"protocol",
       {{"h", s.protocol.h},
        {"delta", s.protocol.delta},
        {"omega0", s.protocol.omega0},
        {"patrol_margin", s.protocol.patrol_margin}}},
      {"dt", s.dt},
      {"horizon", s.horizon},
      {"seed", s.seed},
      {"convergence_stop", s.convergence_stop},
      {"trace", {{"agent_stride", s.agent_stride}}},
  };
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override '" + assignment + "' must look like key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  std::string pointer;
  std::size_t start = 0;
  while (start <= key.size()) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw std::invalid_argument("override key '" + key + "' has an empty component");
    pointer += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  try {
    doc[json::json_pointer(pointer)] = value;
  } catch (const json::exception& e) {
    throw std::invalid_argument("cannot apply override '" + assignment + "': " + e.what());
  }
}

Scenario case_study_scenario() {
  Scenario s;
  s.mode = Mode::multi_layer;
  s.layers = {SinusoidSpec{1.0, 0.15, 4.0}, SinusoidSpec{2.0, 0.15, 10.0}, SinusoidSpec{3.0, 0.15, 40.0}};
  s.gamma = 1.0;
  s.density.kind = DensitySpec::Kind::linear_phase;
  s.agent_count = 50;
  s.init.kind = InitSpec::Kind::disk;
  s.init.radius = 0.8;
  s.gains.kappa_r = 0.1;
  s.gains.kappa_omega = 0.01;
  s.gains.kappa_s = 0.05;
  s.grid_cells = 2048;
  s.protocol.h = 0.95;
  s.dt = 0.5;
  s.horizon = 60000.0;
  s.seed = 3;
  s.agent_stride = 200;
  return s;
}

}  // namespace ringcover
