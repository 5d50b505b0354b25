#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace symplattice::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitResource = 3,
  kExitCalibration = 4,
};

const std::vector<std::string>& command_names();

// Runs one command. The report goes to the `output` key's file, or to `out`
// when that key is unset; run metadata (timing, resolved thread count) goes to
// a separate file so the report itself is byte-reproducible. Errors are
// written to `err` with the offending key, and mapped to an ExitCode.
int run(const std::string& command, Config& cfg, std::ostream& out, std::ostream& err);

}  // namespace symplattice::cli
