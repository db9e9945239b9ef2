#include "ringcover/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ringcover {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace, double dt) {
  out << "t,id,x,y,phi,r,role,k,s,c\n";
  for (const AgentRecord& a : trace.agents) {
    out << format_double(a.tick * dt) << ',' << a.id << ',' << format_double(a.x) << ','
        << format_double(a.y) << ',' << format_double(a.phi) << ',' << format_double(a.r) << ','
        << (a.role == Role::Layer ? 1 : 0) << ',' << a.layer << ','
        << (a.division ? format_double(*a.division) : std::string()) << ','
        << (a.detect == DetectState::Saturated ? 1 : 0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SimulationTrace& trace) {
  out << 't';
  for (int k = 1; k <= trace.layer_count; ++k) out << ",P_" << k;
  out << ",P\n";
  for (const RoundRecord& r : trace.rounds) {
    out << format_double(r.t);
    for (double p : r.layer_p) out << ',' << format_double(p);
    out << ',' << format_double(r.p) << '\n';
  }
}

void write_events_csv(std::ostream& out, const SimulationTrace& trace) {
  out << "t,tick,kind,agent,layer,other\n";
  for (const Event& e : trace.events) {
    out << format_double(e.t) << ',' << e.tick << ',' << e.kind << ',' << e.agent << ','
        << e.layer << ',' << e.other << '\n';
  }
}

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void write_one(const fs::path& dir, const Scenario& scenario, const SimulationTrace& trace) {
  fs::create_directories(dir);
  Scenario echo = scenario;
  echo.mode = trace.mode;
  open_out(dir / "config.json") << scenario_to_json(echo).dump(2) << '\n';
  auto trace_file = open_out(dir / "trace.csv");
  write_trace_csv(trace_file, trace, scenario.dt);
  auto summary = open_out(dir / "summary.csv");
  write_summary_csv(summary, trace);
  auto events = open_out(dir / "events.csv");
  write_events_csv(events, trace);
}

}  // namespace

void write_run_outputs(const fs::path& dir, const Scenario& scenario,
                       const std::vector<SimulationTrace>& traces) {
  if (scenario.mode != Mode::both) {
    if (traces.size() != 1) throw std::invalid_argument("expected one trace");
    write_one(dir, scenario, traces.front());
    return;
  }
  fs::create_directories(dir);
  open_out(dir / "config.json") << scenario_to_json(scenario).dump(2) << '\n';
  for (const SimulationTrace& t : traces) write_one(dir / mode_name(t.mode), scenario, t);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no column '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_line(line));
    if (t.rows.back().size() != t.header.size()) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(t.rows.size()) +
                               " has the wrong number of cells");
    }
  }
  return t;
}

}  // namespace ringcover
