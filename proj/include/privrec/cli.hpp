#pragma once

#include <iosfwd>

namespace privrec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/// Entry point of the `privrec` command line tool. Subcommands: synth,
/// ingest, analyze, score, recommend, serve, eval-report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace privrec
