#pragma once

#include <ostream>

namespace chirp2d::cli {

/// Runs the command line. Returns 0 on success, 1 on a usage error and 2
/// when the command itself fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace chirp2d::cli
