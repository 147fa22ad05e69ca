#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gpflow/pcg.hpp"

namespace gpflow {

/// Two lowest eigenpairs of an operator self-adjoint in <.,.>_h.
struct EigenResult {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double gap = 0.0;  // lambda1 - lambda0
  std::vector<double> v0, v1;  // unit h-norm; v0 has nonnegative h-weighted mean
  int iterations = 0;
};

struct EigenOptions {
  int max_iter = 500;
  int block = 6;
  std::uint64_t seed = 0;
  /// Approximate inverse of A for the inner pcg solves; identity when empty.
  LinearMap preconditioner;
  /// Optional starting guess for the lowest mode.
  std::vector<double> initial;
};

/// Block inverse iteration with Rayleigh-Ritz: each outer step solves
/// A Y = X column by column with pcg and diagonalizes A on span(Y). Stops when
/// ||A v - lambda v||_h <= tol |lambda| for both pairs. A must be positive
/// definite. Throws ConvergenceError when the budget is exhausted.
EigenResult lowest_two_eigenpairs(const LinearMap& apply_A, std::span<const double> weights, double tol,
                                  const EigenOptions& options = {});

}  // namespace gpflow
