#pragma once

#include <string>
#include <vector>

namespace irec::cli {

// Exit codes: 0 success, 1 unexpected failure, 2 configuration or usage
// error, 3 data error, 4 transport error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitTransport = 4;

// Parses the command line and runs one subcommand, never throwing.
int run(int argc, const char* const* argv);
// Same, with args[0] as the program name.
int run(const std::vector<std::string>& args);

}  // namespace irec::cli
