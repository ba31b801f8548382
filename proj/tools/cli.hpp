#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hrush::cli {

// Runs one command line (without the program name). Exit codes: 0 success,
// 1 domain error or exceeded budget, 2 malformed input or usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Value of --timeout-ms in `args`, 0 when absent or malformed.
long timeout_ms(const std::vector<std::string>& args);

}  // namespace hrush::cli
