#pragma once

#include <ostream>

namespace ncpano {

// Runs the command-line front end. Returns the process exit code: 0 on
// success, 1 for usage errors, otherwise exit_code() of the failure.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ncpano
