#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace turnpike_cli {

// Raised for invalid command-line configurations; the executable maps it to
// exit code 2, while library errors exit with code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  std::string command;
  std::string problem_file;  // JSON instance on disk, or
  std::string name;          // a canonical zoo name (exactly one of the two)
  std::optional<double> T;   // horizon
  std::vector<double> T_list;  // horizons for the sweep command
  std::optional<int> N;      // grid steps
  std::string out = "turnpike_out";
  unsigned long long seed = 0;
};

// TURNPIKE_OUT, when set and nonempty, overrides the output directory.
void apply_env_override(RunConfig& cfg);

// Executes one command, writing its files under cfg.out and progress notes
// to log. Throws ConfigError for bad configurations; solver failures
// propagate as the library's typed errors.
void run(const RunConfig& cfg, std::ostream& log);

}  // namespace turnpike_cli
