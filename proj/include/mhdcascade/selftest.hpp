#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mhdc {

struct SelfCheck {
  std::string name;
  std::function<bool()> run;
};

// Quick checks with exact or analytic answers on small grids, one per line
// of output.
std::vector<SelfCheck> selftest_checks();

// Prints "PASS name" / "FAIL name" per check and a summary; true when all pass.
// A check that throws counts as a failure and prints the message.
bool run_selftest(std::ostream& out);

}  // namespace mhdc
