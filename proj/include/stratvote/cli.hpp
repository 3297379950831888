#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stratvote {

inline constexpr const char* kToolName = "stratvote";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitCompareFailed = 2,
  kExitUnsupported = 3,
  kExitIo = 4,
};

/// Runs one command line (args[0] is the program name). Results go to the
/// --out file or to `out`; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stratvote
