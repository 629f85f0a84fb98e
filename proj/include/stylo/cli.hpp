#pragma once

#include <ostream>
#include <span>
#include <string>

namespace stylo {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs the command line (without the program name). Subcommands: stats,
/// extract, cv, experiment, train, translate, report, serve. Every run
/// writes a JSON manifest of its inputs, parameters and output digests.
int cli_run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace stylo
