#include "gpflow/eigenpairs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "gpflow/errors.hpp"
#include "gpflow/kernels.hpp"

namespace gpflow {

EigenResult lowest_two_eigenpairs(const LinearMap& apply_A, std::span<const double> weights, double tol,
                                  const EigenOptions& options) {
  const std::size_t n = weights.size();
  if (n < 2) throw InvalidArgument("need at least two unknowns for two eigenpairs");
  const int p = static_cast<int>(std::min<std::size_t>(std::max(options.block, 2), n));
  const auto& k = kernels::active();
  const double* w = weights.data();
  auto wdot = [&](const std::vector<double>& a, const std::vector<double>& b) { return k.wdot(w, a.data(), b.data(), n); };

  const LinearMap identity = [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
  const LinearMap& precond = options.preconditioner ? options.preconditioner : identity;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<std::vector<double>> X(p, std::vector<double>(n));
  for (int j = 0; j < p; ++j) {
    for (auto& x : X[j]) x = uni(rng);
  }
  if (!options.initial.empty()) {
    require_length(n, options.initial.size());
    if (std::any_of(options.initial.begin(), options.initial.end(), [](double v) { return v != 0.0; })) {
      X[0] = options.initial;
    }
  }
  std::vector<double> theta(p, 1.0);

  std::vector<std::vector<double>> Y(p, std::vector<double>(n)), AY(p, std::vector<double>(n));
  std::vector<std::vector<double>> AX(p, std::vector<double>(n));
  for (int it = 1; it <= options.max_iter; ++it) {
    for (int j = 0; j < p; ++j) {
      // Warm start from the Ritz estimate A^{-1} x ~ x / theta.
      for (std::size_t i = 0; i < n; ++i) Y[j][i] = X[j][i] / theta[j];
      pcg(apply_A, precond, weights, X[j], Y[j], 1e-13, 2000);
    }
    // Two passes of weighted Gram-Schmidt keep the Ritz Gram matrix well conditioned.
    for (int j = 0; j < p; ++j) {
      for (int pass = 0; pass < 2; ++pass) {
        for (int a = 0; a < j; ++a) k.axpby(-wdot(Y[a], Y[j]), Y[a].data(), 1.0, Y[j].data(), n);
      }
      const double ny = std::sqrt(wdot(Y[j], Y[j]));
      if (!(ny > 0.0)) throw ConvergenceError("eigensolver block became rank deficient");
      for (auto& y : Y[j]) y /= ny;
      apply_A(Y[j], AY[j]);
    }
    Eigen::MatrixXd G(p, p), B(p, p);
    for (int a = 0; a < p; ++a) {
      for (int b = a; b < p; ++b) {
        G(a, b) = G(b, a) = 0.5 * (wdot(Y[a], AY[b]) + wdot(Y[b], AY[a]));
        B(a, b) = B(b, a) = wdot(Y[a], Y[b]);
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rr(G, B);
    if (rr.info() != Eigen::Success) throw ConvergenceError("Rayleigh-Ritz step failed at iteration " + std::to_string(it));
    const Eigen::MatrixXd& C = rr.eigenvectors();
    for (int j = 0; j < p; ++j) {
      std::fill(X[j].begin(), X[j].end(), 0.0);
      std::fill(AX[j].begin(), AX[j].end(), 0.0);
      for (int a = 0; a < p; ++a) {
        k.axpby(C(a, j), Y[a].data(), 1.0, X[j].data(), n);
        k.axpby(C(a, j), AY[a].data(), 1.0, AX[j].data(), n);
      }
      theta[j] = rr.eigenvalues()[j];
    }

    bool done = true;
    for (int j = 0; j < 2; ++j) {
      std::vector<double> r = AX[j];
      k.axpby(-theta[j], X[j].data(), 1.0, r.data(), n);
      const double nx = std::sqrt(wdot(X[j], X[j]));
      if (std::sqrt(wdot(r, r)) / nx > tol * std::abs(theta[j])) done = false;
    }
    if (done) {
      EigenResult res;
      res.lambda0 = theta[0];
      res.lambda1 = theta[1];
      res.gap = theta[1] - theta[0];
      res.iterations = it;
      for (int j = 0; j < 2; ++j) {
        std::vector<double>& v = j == 0 ? res.v0 : res.v1;
        v = X[j];
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += w[i] * v[i];
        const double s = (mean < 0.0 ? -1.0 : 1.0) / std::sqrt(wdot(v, v));
        for (auto& x : v) x *= s;
      }
      return res;
    }
  }
  throw ConvergenceError("eigensolver did not converge within " + std::to_string(options.max_iter) + " iterations");
}

}  // namespace gpflow
