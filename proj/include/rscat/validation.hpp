#pragma once

#include <string>
#include <vector>

namespace rscat {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Support, reality, symmetry, linearity and Hermitian-reality invariants of
/// every module on small grids. Each check is self-contained and seeded.
std::vector<CheckResult> run_validation_suite();

}  // namespace rscat
