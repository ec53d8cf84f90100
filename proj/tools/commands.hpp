#pragma once

#include <iosfwd>
#include <string_view>

#include "run_config.hpp"
#include "splitring/error.hpp"

namespace splitring::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kConfigError = 2,
  kNumerical = 3,
  kFitNotConverged = 4,
};

/// Runs one subcommand, writing artifacts under cfg.out_dir and a one-line
/// summary to `out`. Row-level numerical failures are reported on `err`
/// after the CSV is written. Library errors propagate as splitring::Error.
int execute(std::string_view command, const RunConfig& cfg, bool plot, std::ostream& out,
            std::ostream& err);

/// Exit code for a library error category.
int exit_code_for(ErrorKind kind);

}  // namespace splitring::cli
