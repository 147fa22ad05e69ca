#pragma once

#include <string>
#include <vector>

#include "gpflow/errors.hpp"
#include "gpflow/flows.hpp"
#include "gpflow/grid.hpp"
#include "gpflow/potentials.hpp"

namespace gpflow {

/// Configuration error; `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(int line, const std::string& what)
      : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class InitialGuess { Constant, Beta0GroundState, Random };

struct RunConfig {
  GridSpec grid;
  std::string mesh_path;  // non-empty selects P1 on this mesh instead of the tensor grid
  PotentialSpec potential;
  double beta = 0.0;
  FlowConfig flow;
  StopRule stop;
  InitialGuess initial = InitialGuess::Constant;
  std::vector<int> levels;          // cells per dimension for studies
  std::vector<Scheme> schemes;      // convergence study schemes; defaults to grid.scheme
  std::vector<FlowKind> compare;    // flows run by the compare subcommand
  std::string prefix = "gpflow";
};

/// INI text with sections [grid], [problem], [flow], [stop], [study], [output].
/// [grid] and [problem] are required. Unknown keys, bad values and missing
/// sections raise ConfigError with the line number.
RunConfig parse_config(const std::string& text);
/// Reads and parses a file; a relative mesh path is resolved against the
/// directory of the config file.
RunConfig load_config(const std::string& path);

}  // namespace gpflow
