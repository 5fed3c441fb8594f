#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tmcli {

enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kInputError = 2,
  kSimulationError = 3,
};

struct Options {
  /// Colour diagnostics on `err`.
  bool color = false;
};

/// Runs `tm` with `args` (excluding the program name). Paths may be "-" for
/// `in` or "builtin:<name>" for an embedded fixture.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const Options& options = {});

}  // namespace tmcli
