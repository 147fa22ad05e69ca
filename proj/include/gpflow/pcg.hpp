#pragma once

#include <functional>
#include <span>

namespace gpflow {

/// out = Op(in) on vectors of a fixed length.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct PcgResult {
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;  // h-norm, relative to ||b||_h
};

/// Preconditioned conjugate gradients for A x = b with A and P self-adjoint
/// and positive definite in <u, v>_h = sum w_i u_i v_i. `x` holds the initial
/// guess on entry. Stops when ||b - A x||_h <= tol ||b||_h or after maxiter
/// iterations (converged = false). Non-positive curvature throws
/// ConvergenceError naming the iteration.
PcgResult pcg(const LinearMap& apply_A, const LinearMap& apply_P, std::span<const double> weights,
              std::span<const double> b, std::span<double> x, double tol, int maxiter);

}  // namespace gpflow
