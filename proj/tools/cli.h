#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace termcorpus::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 1;
inline constexpr int kIoFailure = 2;

// Entry point for the `termcorpus` tool. `args` excludes the program name.
// Subcommands: match, split, corrupt, stats, eval, loss, unique-test.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace termcorpus::cli
