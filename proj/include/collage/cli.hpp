#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace collage::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitIo = 3,
};

// Runs the `collage` command line. args[0] is the program name. Results go
// to `out`, logs and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace collage::cli
