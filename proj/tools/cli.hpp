#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orlicz::cli {

/// Runs one invocation; args excludes the program name. Returns the exit
/// status: 0 success, 1 library error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orlicz::cli
