#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flatcalc {

/// Runs one task. `args` excludes the program name: the task first, then an
/// input (problem file, or symmetry name for kdv-lift) and flags.
/// Returns 0 for pass/witness, 1 for fail/bounded-no, 2 for input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flatcalc
