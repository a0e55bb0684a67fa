#pragma once

#include <iosfwd>

namespace sensboot {

/// Runs one subcommand (rank, sample, train, eval, score, split) and returns
/// its exit code: 0 success, 2 configuration, 3 data, 4 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sensboot
