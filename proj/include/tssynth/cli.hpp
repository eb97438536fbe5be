#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tssynth::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 2, kNumericalAbort = 3 };

/// Runs the `tssynth` command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tssynth::cli
