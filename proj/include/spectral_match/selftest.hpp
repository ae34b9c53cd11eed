#pragma once

#include <iosfwd>

namespace spectral_match {

/// Runs the invariant suite on built-in fixtures, printing one line per check.
/// Returns the number of failed checks.
int run_selftest(std::ostream& out);

}  // namespace spectral_match
