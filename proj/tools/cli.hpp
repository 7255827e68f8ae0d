#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdpalign::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kComputeError = 3,
    kVerificationFailed = 4,
};

/// Runs one mdpalign invocation. `args` excludes the program name. Reports go
/// to `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mdpalign::cli
