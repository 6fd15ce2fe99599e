#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace appl::cli {

/// Process exit codes.
enum Exit : int {
    Ok = 0,
    Usage = 1,
    ParseFailed = 2,
    CheckRejected = 3,
    OstFailed = 4,
    OracleInfeasible = 5,
    CheckUnknown = 6,
};

/// Runs one command line (without the program name). The JSON report goes
/// to `out`, or to the file named by --json with a one-line summary on `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace appl::cli
