#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace droplab::cli {

// Parses argv-style arguments (without the program name) and runs the
// selected subcommand. Returns the process exit code: 0 on success, 2 for
// usage errors, droplab::exit_code() for typed failures, 1 otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace droplab::cli
