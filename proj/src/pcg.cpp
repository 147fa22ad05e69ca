#include "gpflow/pcg.hpp"

#include <cmath>
#include <vector>

#include "gpflow/errors.hpp"
#include "gpflow/kernels.hpp"

namespace gpflow {

PcgResult pcg(const LinearMap& apply_A, const LinearMap& apply_P, std::span<const double> weights,
              std::span<const double> b, std::span<double> x, double tol, int maxiter) {
  const std::size_t n = b.size();
  require_length(n, x.size());
  require_length(n, weights.size());
  const auto& k = kernels::active();
  const double* w = weights.data();

  PcgResult res;
  const double bnorm = std::sqrt(k.wdot(w, b.data(), b.data(), n));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  apply_A(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double rnorm = std::sqrt(k.wdot(w, r.data(), r.data(), n));
  res.relative_residual = rnorm / bnorm;
  if (res.relative_residual <= tol) {
    res.converged = true;
    return res;
  }
  apply_P(r, z);
  p = z;
  double rz = k.wdot(w, r.data(), z.data(), n);
  for (int it = 1; it <= maxiter; ++it) {
    apply_A(p, q);
    const double curv = k.wdot(w, p.data(), q.data(), n);
    if (!(curv > 0.0)) throw ConvergenceError("pcg breakdown: non-positive curvature at iteration " + std::to_string(it));
    const double a = rz / curv;
    k.axpby(a, p.data(), 1.0, x.data(), n);
    k.axpby(-a, q.data(), 1.0, r.data(), n);
    rnorm = std::sqrt(k.wdot(w, r.data(), r.data(), n));
    res.iterations = it;
    res.relative_residual = rnorm / bnorm;
    if (res.relative_residual <= tol) {
      res.converged = true;
      return res;
    }
    apply_P(r, z);
    const double rz_next = k.wdot(w, r.data(), z.data(), n);
    if (!(rz_next > 0.0)) throw ConvergenceError("pcg breakdown: preconditioner not positive at iteration " + std::to_string(it));
    k.axpby(1.0, z.data(), rz_next / rz, p.data(), n);
    rz = rz_next;
  }
  return res;
}

}  // namespace gpflow
