#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bfbm::cli {

// Executes one command line (argv without the program name).  Data rows go
// to `out`, a one-line diagnostic to `err` on failure.  Returns 0 on
// success, 2 when `check` concludes non-existence, 1 on any error.  Output
// is byte-deterministic for identical arguments (including --seed).
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace bfbm::cli
