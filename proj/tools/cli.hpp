#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmcdist::cli {

inline constexpr const char* kSchema = "hmcdist/1";

/// Runs the command line `args` (without the program name). Returns the exit
/// code: 0 clean, 1 negative verdict, 2 usage or validation error.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace hmcdist::cli
