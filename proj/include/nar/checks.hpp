#pragma once

#include <string>
#include <vector>

namespace nar {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Named invariant batteries behind the `check` CLI subcommand. Suites:
// graph, oracles, wl, autodiff, mpnn, walks, training, or "all".
std::vector<CheckResult> run_checks(const std::string& suite);

}  // namespace nar
