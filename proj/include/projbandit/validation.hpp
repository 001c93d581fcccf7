#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace projbandit {

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Worst observed residual or gap.
  double worst = 0.0;
  double tolerance = 0.0;
};

/// Numerical self-checks of the projector, estimator, optimizer and eigen
/// routines against independent computations on seeded random inputs.
std::vector<CheckResult> run_self_checks(std::uint64_t seed);

}  // namespace projbandit
