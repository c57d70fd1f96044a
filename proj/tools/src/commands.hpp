#pragma once

#include <iosfwd>

#include "config.hpp"

namespace gsbound::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kMcThreshold = 4,
};

// Runs the configured mode, writing artifacts under cfg.out_dir and a short
// summary to `out`. Returns kOk or kCheckFailed; errors propagate as
// exceptions.
int run(const RunConfig& cfg, std::ostream& out);

}  // namespace gsbound::cli
