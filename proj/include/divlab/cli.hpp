#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace divlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

inline constexpr const char* kSeedEnvVar = "DIVERSITY_LAB_SEED";

/// Runs the `divlab` command line. `args` excludes the program name.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// Explicit flag first, then DIVERSITY_LAB_SEED, then the default.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback);

/// Parses "lo:hi:step" into lo, lo+step, ... up to hi inclusive.
std::vector<double> parse_sweep(const std::string& text);

}  // namespace divlab::cli
