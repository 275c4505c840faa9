#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace snow::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
    kNumericFailure = 3,
};

// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "a:b[:step]" ranges or comma lists such as "1,5,10".
std::vector<double> parse_grid(const std::string& text);

} // namespace snow::cli
