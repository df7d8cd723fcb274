#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace volmf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // replay produced different bytes, or an unexpected error
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kVersion = "0.1.0";

/// Runs one subcommand. `args` excludes the program name.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, char** argv);

}  // namespace volmf
