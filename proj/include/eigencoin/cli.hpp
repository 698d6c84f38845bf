#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eigencoin::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kInternalError = 3,
};

/// Name of the environment variable holding the default config path.
inline constexpr const char* kConfigEnv = "EIGENCOIN_CONFIG";

/// Runs one command line (args[0] is the program name). Reports and models
/// go to files; JSON lines and progress go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eigencoin::cli
