#include "gpflow/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "gpflow/errors.hpp"

namespace gpflow {

void legendre(int n, double x, double& p, double& dp) {
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  double p0 = 1.0;
  double p1 = x;
  for (int m = 2; m <= n; ++m) {
    const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1), away from the endpoints.
  if (std::abs(std::abs(x) - 1.0) < 1e-14) {
    const double s = (x > 0.0 || n % 2 == 1) ? 1.0 : -1.0;
    dp = s * 0.5 * n * (n + 1.0);
  } else {
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  }
}

QuadratureRule gauss_lobatto_rule(int k) {
  if (k < 1) throw InvalidArgument("Gauss-Lobatto rule needs degree k >= 1, got " + std::to_string(k));
  const int m = k + 1;
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (k == 1) {
    rule.nodes = {-1.0, 1.0};
    rule.weights = {1.0, 1.0};
    return rule;
  }

  // Newton on (1 - x^2) P_k'(x) = 0 written as x P_k - P_{k-1} = 0 (Trefethen's
  // lglnodes), started from the Chebyshev-Gauss-Lobatto points.
  std::vector<double> x(m);
  for (int j = 0; j < m; ++j) x[j] = -std::cos(std::numbers::pi * j / k);
  for (int j = 1; j < k; ++j) {
    double xj = x[j];
    for (int it = 0; it < 100; ++it) {
      double pk = 0.0, pkm1 = 0.0, dummy = 0.0;
      legendre(k, xj, pk, dummy);
      legendre(k - 1, xj, pkm1, dummy);
      const double step = (xj * pk - pkm1) / (m * pk);
      xj -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[j] = xj;
  }
  x.front() = -1.0;
  x.back() = 1.0;
  // Enforce exact symmetry of the rule.
  for (int j = 0; j < m / 2; ++j) {
    const double s = 0.5 * (x[m - 1 - j] - x[j]);
    x[j] = -s;
    x[m - 1 - j] = s;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;

  for (int j = 0; j < m; ++j) {
    double pk = 0.0, dp = 0.0;
    legendre(k, x[j], pk, dp);
    rule.nodes[j] = x[j];
    rule.weights[j] = 2.0 / (k * (k + 1.0) * pk * pk);
  }
  for (int j = 0; j < m / 2; ++j) {
    const double w = 0.5 * (rule.weights[j] + rule.weights[m - 1 - j]);
    rule.weights[j] = w;
    rule.weights[m - 1 - j] = w;
  }
  return rule;
}

std::vector<double> lagrange_derivative_matrix(const std::vector<double>& nodes) {
  const std::size_t m = nodes.size();
  std::vector<double> bary(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l) {
      if (l != j) bary[j] *= (nodes[j] - nodes[l]);
    }
    bary[j] = 1.0 / bary[j];
  }
  std::vector<double> d(m * m, 0.0);
  for (std::size_t q = 0; q < m; ++q) {
    double diag = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == q) continue;
      const double v = (bary[j] / bary[q]) / (nodes[q] - nodes[j]);
      d[q * m + j] = v;
      diag -= v;
    }
    d[q * m + q] = diag;
  }
  return d;
}

}  // namespace gpflow
