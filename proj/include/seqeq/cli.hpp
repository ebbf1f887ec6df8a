#pragma once

#include <iosfwd>

namespace seqeq {

/// Exit code for usage, parse, configuration and internal errors.
inline constexpr int kExitError = 3;

/// Command-line entry point. Subcommands: check, parse, xcheck, bench, map,
/// replay. Returns 0 EQUIVALENT/clean, 1 NOT_EQUIVALENT, 2 INCONCLUSIVE or
/// VACUOUS, 3 on errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqeq
