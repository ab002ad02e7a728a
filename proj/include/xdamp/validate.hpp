#pragma once

#include <string>
#include <vector>

#include "xdamp/config.hpp"

namespace xdamp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite: angular algebra, damping-matrix structure, density
/// matrix trace and positivity, the same-n cancellation, detection-matrix
/// normalization, magic-angle zeros, definition equivalence and the
/// reference line-pulling values.
std::vector<CheckResult> run_validation(const RunConfig& config);

}  // namespace xdamp
