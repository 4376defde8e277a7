#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dc2v::cli {

/// Runs the command line `args` (without the program name). Data goes to
/// `out`, diagnostics to `err`; `in` backs `recommend` when no text file is
/// given. Returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err);

}  // namespace dc2v::cli
