#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ringcover/engine.hpp"
#include "ringcover/scenario.hpp"

namespace ringcover {

/// Shortest form that round-trips: printf("%.17g").
std::string format_double(double v);

/// t,id,x,y,phi,r,role,k,s,c with role and c as 0/1 and s empty when unset.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace, double dt);
/// t,P_1,...,P_K,P
void write_summary_csv(std::ostream& out, const SimulationTrace& trace);
/// t,tick,kind,agent,layer,other
void write_events_csv(std::ostream& out, const SimulationTrace& trace);

/// Writes config.json, trace.csv, summary.csv and events.csv into `dir`.
/// A scenario in mode both gets one subdirectory per mode.
void write_run_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                       const std::vector<SimulationTrace>& traces);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// Minimal reader for the files written here: no quoting, comma separated.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ringcover
