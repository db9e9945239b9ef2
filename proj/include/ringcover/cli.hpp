#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ringcover {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitBadConfig = 2,
  kExitBreach = 3,
};

struct RunOptions {
  std::filesystem::path scenario;
  std::filesystem::path out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

/// Loads, overrides, validates and runs a scenario, then writes its outputs.
/// Errors go to `err` as one JSON object per line.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct SweepOptions {
  RunOptions base;
  std::string param;
  std::vector<std::string> values;
  /// Worker threads; 0 means RINGCOVER_THREADS or the hardware count.
  unsigned threads = 0;
};

/// One run per distinct value, written to <out>/runs/<param>=<value>/, and
/// <out>/sweep.csv with columns param_value,P_single,P_multi,status.
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::string suite = "all";
  std::filesystem::path out_dir = "verify_out";
  std::optional<std::filesystem::path> replay;
};

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker count for parallel runs: RINGCOVER_THREADS if set and positive,
/// otherwise the hardware concurrency.
unsigned default_thread_count();

}  // namespace ringcover
