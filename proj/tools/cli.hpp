#pragma once

#include <iosfwd>

namespace descore {

/// Entry point of the command-line tool. Exit codes: 0 success, 2 usage error,
/// 3 data error, 4 numerical degeneracy.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace descore
