#pragma once

#include <vector>

namespace gpflow {

struct QuadratureRule {
  std::vector<double> nodes;    // ascending, on [-1, 1]
  std::vector<double> weights;  // positive, sum to 2
};

/// (k+1)-point Gauss-Lobatto rule on [-1, 1]: the endpoints plus the roots of
/// P_k'. Exact for polynomials of degree <= 2k-1. Throws InvalidArgument for k < 1.
QuadratureRule gauss_lobatto_rule(int k);

/// Legendre polynomial P_n(x) and its derivative, by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp);

/// Differentiation matrix D(q, j) = l_j'(x_q) of the Lagrange basis on `nodes`,
/// stored row-major (size m*m).
std::vector<double> lagrange_derivative_matrix(const std::vector<double>& nodes);

}  // namespace gpflow
