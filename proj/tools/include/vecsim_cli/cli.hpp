#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vecsim::cli {

// Exit codes: 0 ok, 1 runtime failure, 2 bad config or arguments,
// 3 instance too large for the exhaustive oracle.
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSize = 3;

// Environment variable consulted for the output directory when neither the
// config file nor --output-dir sets one.
inline constexpr const char* kOutputDirEnv = "VECSIM_OUTPUT_DIR";

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vecsim::cli
