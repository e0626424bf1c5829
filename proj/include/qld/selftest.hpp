#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qld {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Reduced-size run of the invariant suite (identities, closed forms, bound
// ordering, Monte Carlo sandwich). Completes in a few seconds.
std::vector<CheckResult> run_selftest(std::uint64_t seed, unsigned workers);

}  // namespace qld
