#pragma once

#include <iosfwd>

namespace rbocoop {

/// Entry point of the `rbocoop` command. Exit codes: 0 success, 1 invalid
/// configuration or usage, 2 I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbocoop
