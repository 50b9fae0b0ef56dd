#pragma once

#include <string>
#include <vector>

namespace mcg {

/// Entry point behind the `mcg` binary: run / compare / reconstruct / report.
/// `args` excludes the program name.  Returns the process exit code:
/// 0 success, 2 configuration or usage error, 3 data error (unreadable or
/// malformed files).
int cli_main(const std::vector<std::string>& args);

}  // namespace mcg
