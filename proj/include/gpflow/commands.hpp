#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "gpflow/config.hpp"
#include "gpflow/discretization.hpp"
#include "gpflow/energy.hpp"

namespace gpflow {

struct CommandOptions {
  std::uint64_t seed = 0;
  int threads = 0;  // 0 keeps the runtime default
  std::optional<std::string> out_prefix;
  /// Writes 0 for wall_seconds so repeated runs give byte-identical files.
  bool deterministic = false;
};

/// Exit codes of the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNotConverged = 2;

/// Runs "solve", "convergence", "eigengap", "compare" or "verify". Progress
/// goes to `log`. Files are `<prefix>_trace.csv`, `<prefix>_summary.csv`,
/// `<prefix>_table.csv` and, for compare, `<prefix>_<kind>_trace.csv`. On an
/// error every file written so far is removed and the error is rethrown.
int run_command(const std::string& name, const RunConfig& config, const CommandOptions& options, std::ostream& log);

/// The discretization selected by the config (tensor grid or P1 mesh).
DiscretizationPtr build_discretization(const RunConfig& config);
/// Initial state per config.initial (normalized).
State initial_state(const RunConfig& config, const DiscretizationPtr& disc, const std::vector<double>& potential,
                    std::uint64_t seed);

/// Full-precision scientific formatting used for every CSV value.
std::string csv_number(double x);

}  // namespace gpflow
