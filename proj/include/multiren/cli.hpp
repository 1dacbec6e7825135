#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace multiren::cli {

enum ExitCode { kOk = 0, kDomain = 1, kUsage = 2, kNumeric = 3 };

/// Runs one subcommand. args[0] is the program name. Summaries go to out,
/// diagnostics to err; files are written under the output directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace multiren::cli
