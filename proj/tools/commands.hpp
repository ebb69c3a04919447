#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace lmgf::app {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kSolverSingular = 3,
  kQuadratureFailed = 4,
};

struct CliOptions {
  std::string config_path;
  std::string out_path;  // overrides output.path; empty and no output.path means stdout
  bool strict = false;
  bool verbose = false;
  unsigned long long seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

// column names, part of the public output contract
std::string spectral_header();
std::string spatial_header();

int cmd_spectral(const RunConfig& config, const CliOptions& opt, std::ostream& log);
int cmd_spatial(const RunConfig& config, const CliOptions& opt, std::ostream& log);
int cmd_validate(const RunConfig& config, const CliOptions& opt, std::ostream& out, std::ostream& log);
int cmd_selfcheck(const CliOptions& opt, std::ostream& out);

}  // namespace lmgf::app
