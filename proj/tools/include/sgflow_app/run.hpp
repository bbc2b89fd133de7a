#pragma once

#include <iosfwd>

#include "sgflow_app/config.hpp"

namespace sgflow::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitBlowUp = 2,
  kExitPositivityLost = 3,
  kExitCfl = 4,
  kExitNoConvergence = 5,
  kExitIo = 6,
  kExitVerifyFailed = 7,
};

int exit_code(Termination t);

/// Executes the configured mode, writing artifacts under cfg.output.dir and
/// a short report to `log`. Returns the process exit status.
int run_command(const RunConfig& cfg, std::ostream& log);

}  // namespace sgflow::app
