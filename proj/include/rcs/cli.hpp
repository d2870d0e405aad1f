#pragma once

#include <iosfwd>

namespace rcs {

/// Full command-line surface, runnable in-process for testing. Returns the
/// process exit code: 0 success, 1 runtime error, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rcs
