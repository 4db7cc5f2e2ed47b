#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace analogy::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kValidation = 2,   ///< malformed scenario, unknown atom, bad flag value
    kInfeasible = 3,   ///< model finder exhausted its budget
    kNotFound = 4,     ///< counterexample miner exhausted its budget
    kIo = 5,           ///< missing or unwritable file
};

/// Format version stamped into JSON reports and CSV headers.
inline constexpr int kReportVersion = 1;

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace analogy::cli
