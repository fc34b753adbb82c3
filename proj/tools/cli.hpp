// Command-line front end. Returns the process exit code: 0 on success, 1 for
// a failed run, 2 for usage errors.
#pragma once

#include <iosfwd>

namespace pfrac {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pfrac
