#pragma once

#include <ostream>

namespace clear::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `clear` tool. Subcommands: generate, render, questions,
/// verify, evaluate, baselines. Returns 0 on success, 1 on validation or
/// runtime failures, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clear::cli
