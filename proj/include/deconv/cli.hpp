#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace deconv::cli {

/// Exit statuses, one per failure class.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,           // unknown flag, missing option, bad value syntax
  kInvalidArgument = 3, // value outside its domain, length mismatch
  kMalformedInput = 4,  // bad mask string or profile CSV
  kCapExceeded = 5,
  kUndefinedCrossover = 6,
  kNoInformativePositions = 7,
  kQuadrature = 8,
  kIo = 9,
};

/// Parses "start:stop:step" into start, start + step, ... up to stop
/// (inclusive, with a 1e-9 relative snap). A single number is a one-point
/// grid.
std::vector<double> parse_grid(const std::string& spec);

/// Runs one subcommand. args excludes the program name. Artifacts go to
/// `out` (or to --out), diagnostics to `err` as a single line.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace deconv::cli
