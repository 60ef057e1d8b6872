#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcps::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitExperiment = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "TCPS_OUT_DIR";

/// Runs one command line (without the program name) and returns the exit
/// code: 0 on success, 2 on a usage or config error, 3 when the experiment
/// itself fails.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcps::cli
