#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace carleman {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNonConvergence = 3 };

struct RunOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes `<out_dir>/<subcommand>.csv` (plus
/// `<subcommand>-fit.csv` for sweeps). Diagnostics go to `log`.
int run(const RunOptions& options, std::ostream& log);

}  // namespace carleman
