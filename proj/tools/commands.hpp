#ifndef VBMA_TOOLS_COMMANDS_HPP
#define VBMA_TOOLS_COMMANDS_HPP

#include <string>
#include <vector>

namespace vbma::cli {

/// Runs the `vbma` command line with `args` (program name excluded).
/// Returns the process exit code: 0 success, 2 usage, 3 data, 4 numeric.
int run(const std::vector<std::string>& args);

/// "1..6", "4" or "1,3,5".
std::vector<int> parse_components(const std::string& text);
std::vector<double> parse_doubles(const std::string& text);

}  // namespace vbma::cli

#endif  // VBMA_TOOLS_COMMANDS_HPP
