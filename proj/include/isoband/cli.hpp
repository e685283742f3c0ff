#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace isoband {

/// Options shared by the band and calibrate subcommands.
struct RunConfig {
  std::string input;
  double gamma = 0.5;
  double alpha = 0.05;
  std::string family = "triangular";
  std::string cap = "half";
  std::string kappa = "bonferroni";
  std::uint64_t seed = 1;
  bool sshape = false;
  std::string mu_grid = "midpoints";
  std::string out;
  std::string plot;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3 };

/// Entry point of the command-line tool. Output goes to `out`, diagnostics
/// to `err`; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isoband
