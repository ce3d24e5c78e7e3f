#pragma once

// Command-line front end. Subcommands: spherical, cfit, norms, spectrum,
// counterexample, poisson, roe, euclid. Each prints a one-line JSON summary.
//
// Exit codes: 0 success, 1 selftest failure, 2 configuration error (bad
// flags, unknown subcommand, unwritable output path), 3 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace roekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftest = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace roekit::cli
