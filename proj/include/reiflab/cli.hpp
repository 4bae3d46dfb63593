#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reiflab::cli {

enum ExitCode { kPass = 0, kBoundFailed = 1, kUsage = 2, kInapplicable = 3 };

/// Runs one command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

} // namespace reiflab::cli
