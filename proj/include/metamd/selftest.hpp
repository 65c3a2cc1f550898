#pragma once

#include <iosfwd>

namespace metamd {

/// Runs the embedded example and invariant checks, printing one line per
/// check. Returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace metamd
