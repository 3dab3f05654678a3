#pragma once

#include <ostream>

namespace cstrph::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 1,
    kExitCondition = 2,
    kExitAbort = 3,
};

/// Entry point of the cstrph tool; writes reports to `out` and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cstrph::cli
