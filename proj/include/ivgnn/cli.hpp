#pragma once

// Command-line front end. `dispatch` is the whole program minus process
// setup so it can be driven from tests.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ivgnn::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

/// `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Line-based `key = value` file. Blank lines and lines starting with '#'
/// are skipped. Throws std::invalid_argument on malformed or repeated keys.
std::map<std::string, std::string> parse_config(std::istream& in);

}  // namespace ivgnn::cli
