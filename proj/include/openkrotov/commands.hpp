#pragma once

#include <filesystem>
#include <iosfwd>

#include "openkrotov/config.hpp"

namespace openkrotov {

/// Process exit statuses.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

struct CommandContext {
  std::filesystem::path out_dir;
  std::ostream* log = nullptr;  ///< progress messages when verbose
};

/// trajectory.csv and observables.csv for the guess field.
void cmd_propagate(const RunConfig& config, const CommandContext& ctx);
/// pulse.csv, convergence.csv and summary.json.
void cmd_optimize(const RunConfig& config, const CommandContext& ctx);
/// scan.csv
void cmd_scan(const RunConfig& config, const CommandContext& ctx);
/// controllability.json; returns the human-readable report.
std::string cmd_controllability(const RunConfig& config, const CommandContext& ctx);

/// Full command-line entry point: `<command> --config <path> [--out <dir>]
/// [--threads <n>] [--verbose]`. The OPENKROTOV_THREADS environment variable
/// overrides the thread count from the config; an explicit --threads wins and the
/// environment is then ignored.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace openkrotov
