#pragma once

#include <iosfwd>

namespace rfhw::cli {

// Runs the rfhw command line. Normal output goes to `out`, diagnostics to
// `err`; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rfhw::cli
