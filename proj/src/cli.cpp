#include "ringcover/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ringcover/engine.hpp"
#include "ringcover/io.hpp"
#include "ringcover/scenario.hpp"
#include "ringcover/verify.hpp"

namespace ringcover {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

Scenario resolve(const RunOptions& opts, const std::vector<std::string>& extra = {}) {
  std::ifstream in(opts.scenario);
  if (!in) throw std::invalid_argument("cannot read scenario " + opts.scenario.string());
  json doc = json::parse(in);
  for (const std::string& o : opts.overrides) apply_override(doc, o);
  for (const std::string& o : extra) apply_override(doc, o);
  if (opts.seed) doc["seed"] = *opts.seed;
  Scenario s = scenario_from_json(doc);
  s.validate();
  return s;
}

const std::map<std::string, std::string>& sweep_keys() {
  static const std::map<std::string, std::string> keys = {
      {"agent_count", "agents.count"}, {"h", "protocol.h"}, {"gamma", "sensing.gamma"}, {"dt", "dt"}};
  return keys;
}

std::string final_p(const std::vector<SimulationTrace>& traces, Mode mode) {
  for (const SimulationTrace& t : traces) {
    if (t.mode == mode) return format_double(t.final_p());
  }
  return "";
}

}  // namespace

unsigned default_thread_count() {
  if (const char* env = std::getenv("RINGCOVER_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  Scenario s;
  try {
    s = resolve(opts);
  } catch (const std::exception& e) {
    report_error(err, "config", e.what());
    return kExitBadConfig;
  }
  const std::vector<SimulationTrace> traces = run_all(s);
  write_run_outputs(opts.out_dir, s, traces);
  int code = kExitOk;
  for (const SimulationTrace& t : traces) {
    out << mode_name(t.mode) << ": " << t.rounds.size() << " rounds, final P " << format_double(t.final_p())
        << (t.converged ? ", converged" : "") << '\n';
    if (t.failure) {
      err << json{{"error", "breach"},
                  {"mode", mode_name(t.mode)},
                  {"tick", t.failure->tick},
                  {"agent", t.failure->agent},
                  {"message", t.failure->message}}
                 .dump()
          << '\n';
      code = kExitBreach;
    }
  }
  return code;
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  auto key = sweep_keys().find(opts.param);
  if (key == sweep_keys().end()) {
    report_error(err, "config", "cannot sweep '" + opts.param + "'; use agent_count, h, gamma or dt");
    return kExitBadConfig;
  }
  std::vector<std::string> values;
  std::vector<double> seen;
  for (const std::string& v : opts.values) {
    double x = 0.0;
    try {
      x = std::stod(v);
    } catch (const std::exception&) {
      report_error(err, "config", "sweep value '" + v + "' is not a number");
      return kExitBadConfig;
    }
    if (std::find(seen.begin(), seen.end(), x) != seen.end()) {
      err << "warning: duplicate sweep value " << v << " dropped\n";
      continue;
    }
    seen.push_back(x);
    values.push_back(v);
  }
  if (values.empty()) {
    report_error(err, "config", "no sweep values");
    return kExitBadConfig;
  }

  std::vector<Scenario> scenarios;
  for (const std::string& v : values) {
    try {
      scenarios.push_back(resolve(opts.base, {key->second + "=" + v}));
    } catch (const std::exception& e) {
      report_error(err, "config", opts.param + "=" + v + ": " + e.what());
      return kExitBadConfig;
    }
  }

  struct Row {
    std::string single, multi, status = "ok";
  };
  std::vector<Row> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        const Scenario& s = scenarios[i];
        const std::vector<SimulationTrace> traces = run_all(s);
        write_run_outputs(opts.base.out_dir / "runs" / (opts.param + "=" + values[i]), s, traces);
        rows[i].single = final_p(traces, Mode::single_layer);
        rows[i].multi = final_p(traces, Mode::multi_layer);
        for (const SimulationTrace& t : traces) {
          if (t.failure) rows[i].status = "breach";
        }
      } catch (const std::exception& e) {
        rows[i].status = "error";
        (void)e;
      }
    }
  };
  const unsigned threads = std::min<unsigned>(opts.threads ? opts.threads : default_thread_count(),
                                              static_cast<unsigned>(values.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  fs::create_directories(opts.base.out_dir);
  std::ofstream csv(opts.base.out_dir / "sweep.csv");
  csv << "param_value,P_single,P_multi,status\n";
  bool all_ok = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    csv << values[i] << ',' << rows[i].single << ',' << rows[i].multi << ',' << rows[i].status << '\n';
    out << opts.param << '=' << values[i] << ": single " << (rows[i].single.empty() ? "-" : rows[i].single)
        << ", multi " << (rows[i].multi.empty() ? "-" : rows[i].multi) << ", " << rows[i].status << '\n';
    if (rows[i].status != "ok") {
      all_ok = false;
      report_error(err, rows[i].status, opts.param + "=" + values[i] + " did not complete cleanly");
    }
  }
  return all_ok ? kExitOk : kExitBreach;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.replay) {
    std::ifstream in(*opts.replay);
    if (!in) {
      report_error(err, "config", "cannot read fixture " + opts.replay->string());
      return kExitBadConfig;
    }
    CheckOutcome o;
    try {
      o = replay_fixture(json::parse(in));
    } catch (const std::exception& e) {
      report_error(err, "config", e.what());
      return kExitBadConfig;
    }
    out << (o.passed ? "PASS" : "FAIL");
    for (const auto& [k, v] : o.values) out << ' ' << k << '=' << format_double(v);
    if (!o.detail.empty()) out << " (" << o.detail << ')';
    out << '\n';
    return o.passed ? kExitOk : kExitCheckFailed;
  }
  std::vector<std::string> names;
  if (opts.suite == "all") {
    names = suite_names();
  } else {
    const auto all = suite_names();
    if (std::find(all.begin(), all.end(), opts.suite) == all.end()) {
      report_error(err, "config", "unknown suite '" + opts.suite + "'");
      return kExitBadConfig;
    }
    names = {opts.suite};
  }
  std::vector<SuiteResult> results;
  for (const std::string& n : names) {
    results.push_back(run_suite(n));
    const SuiteResult& r = results.back();
    write_suite_outputs(opts.out_dir, r);
    out << r.name << ": " << (r.passed ? "PASS" : "FAIL") << " (" << r.outcomes.size() - r.failures() << '/'
        << r.outcomes.size() << ", " << format_double(r.seconds) << " s)\n";
  }
  write_verify_summary(opts.out_dir, results);
  const bool ok = std::all_of(results.begin(), results.end(), [](const SuiteResult& r) { return r.passed; });
  return ok ? kExitOk : kExitCheckFailed;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-layer ring barrier coverage simulator"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the scenario seed");

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its traces");
  run_cmd->add_option("scenario", run_opts.scenario, "Scenario JSON")->required();
  run_cmd->add_option("-o,--out", run_opts.out_dir, "Output directory");
  run_cmd->add_option("--set", run_opts.overrides, "Override key=value (dotted path)");

  SweepOptions sweep_opts;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one scenario over several parameter values");
  sweep_cmd->add_option("scenario", sweep_opts.base.scenario, "Scenario JSON")->required();
  sweep_cmd->add_option("--param", sweep_opts.param, "agent_count, h, gamma or dt")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("-o,--out", sweep_opts.base.out_dir, "Output directory");
  sweep_cmd->add_option("--set", sweep_opts.base.overrides, "Override key=value (dotted path)");

  VerifyOptions verify_opts;
  std::string replay;
  auto* verify_cmd = app.add_subcommand("verify", "Run property suites");
  verify_cmd->add_option("suite", verify_opts.suite, "Suite name or all");
  verify_cmd->add_option("-o,--out", verify_opts.out_dir, "Report directory");
  verify_cmd->add_option("--replay", replay, "Re-run one failed fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    report_error(err, "usage", e.what());
    return kExitBadConfig;
  }
  if (run_cmd->parsed()) {
    run_opts.seed = seed;
    return cmd_run(run_opts, out, err);
  }
  if (sweep_cmd->parsed()) {
    sweep_opts.base.seed = seed;
    std::stringstream ss(values);
    for (std::string v; std::getline(ss, v, ',');) {
      if (!v.empty()) sweep_opts.values.push_back(v);
    }
    return cmd_sweep(sweep_opts, out, err);
  }
  if (!replay.empty()) verify_opts.replay = replay;
  return cmd_verify(verify_opts, out, err);
}

}  // namespace ringcover
