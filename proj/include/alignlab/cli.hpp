#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace alignlab {

// Exit codes: 0 success, 1 usage or I/O error, 2 solver non-convergence,
// 3 certificate failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNonConverged = 2;
inline constexpr int kExitCertificateFailed = 3;

// Runs one CLI invocation (args excludes the program name). All output goes
// through the provided streams so tests can drive it in-process.
int cli_run(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace alignlab
