#pragma once

#include <string>
#include <vector>

// Invariant checks bundled with the CLI so an installed binary can verify
// itself without the test tree.

namespace ub3 {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<SelftestCheck> run_selftest(unsigned long long seed = 1);

}  // namespace ub3
