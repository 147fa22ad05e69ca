#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpflow/grid.hpp"

namespace gpflow {

struct PropertyResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  bool ok = false;
  std::string detail;  // worst observed quantity, human readable
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  int draws = 100;
  /// Extra grid on which the state-level properties are also drawn.
  std::optional<GridSpec> grid;
};

/// Randomized checks of the structural properties of the discretizations,
/// the energy and the flows (retraction bound, norm inequalities, gradient
/// ordering and tangency, energy decay, eigenvalue identity, integration by
/// parts, dense agreement, quadrature exactness, monotonicity, positivity,
/// convexity, eigengap stability, linear rate).
std::vector<PropertyResult> run_property_suite(const SuiteOptions& options = {});

}  // namespace gpflow
