#pragma once

#include <iosfwd>

namespace pia::cli {

// Runs the pia command line. Returns 0 on success, 2 for unparseable flags and
// 1 for runtime errors, which are reported on err as "error: <Category>: msg".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pia::cli
