#pragma once

#include <iosfwd>

namespace recon::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_validation = 2;
inline constexpr int exit_aborted = 3;
inline constexpr int exit_broken = 4;

/// Runs the `recon` command line. Interactive prompts read `in` and write to
/// `err`; results go to `out`.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace recon::cli
