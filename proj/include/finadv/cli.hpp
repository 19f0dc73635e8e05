#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace finadv {

inline constexpr const char* kToolName = "finadv";
inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitViolations = 1, kExitUsage = 2, kExitIo = 3 };

/// Entry point of the command-line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of a file's bytes. Throws IoError.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace finadv
