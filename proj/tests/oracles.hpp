#pragma once

// Dense reference constructions shared by the unit tests.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> uni(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = uni(rng);
  return v;
}

/// Column-by-column matrix of a linear map on R^n.
inline Eigen::MatrixXd dense(const std::function<void(std::span<const double>, std::span<double>)>& f,
                             std::size_t n) {
  Eigen::MatrixXd a(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    f(e, col);
    for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
    e[j] = 0.0;
  }
  return a;
}

/// Kronecker sum sum_a I x .. x L x .. x I of one 1D matrix in `dim` dimensions
/// (axis 0 slowest).
inline Eigen::MatrixXd kron_sum(const Eigen::MatrixXd& l, int dim) {
  const Eigen::Index n = l.rows();
  auto kron = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(std::pow(n, dim)),
                                                static_cast<Eigen::Index>(std::pow(n, dim)));
  for (int axis = 0; axis < dim; ++axis) {
    Eigen::MatrixXd term = axis == 0 ? l : id;
    for (int a = 1; a < dim; ++a) term = kron(term, a == axis ? l : id);
    total += term;
  }
  return total;
}

/// Closed-form FD2 eigenvalue (4/h^2) sin^2(k pi h / (4 L)) on [-L, L].
inline double fd2_mu(int k, double h, double half_width = 1.0) {
  const double s = std::sin(k * std::numbers::pi * h / (4.0 * half_width));
  return 4.0 / (h * h) * s * s;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace oracle
