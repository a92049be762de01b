#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace netdiff::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses and executes one command line (argv[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a digest of a file's bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

}  // namespace netdiff::cli
