#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "gpflow/grid.hpp"
#include "gpflow/tensor.hpp"

namespace gpflow {

/// Full spectrum of the 1D pencil S z = mu B z, where B = M (diagonal) or
/// B = M T for COMPACT4, so that -Delta_h = Z diag(mu) Z^{-1}.
struct Eigen1D {
  Eigen::VectorXd mu;    // ascending
  Eigen::MatrixXd Z;     // columns B-orthonormal: Z^T B Z = I
  Eigen::MatrixXd Zinv;  // Z^T B
  Eigen::MatrixXd B;     // the mass of the pencil
};

/// Throws ContractViolation if S is not symmetric or a weight is not positive.
Eigen1D generalized_sym_eig(const Operator1D& op);

/// Fast diagonalization of a tensor operator: transforms per axis plus the
/// Kronecker-sum eigenvalues sum_a mu_{i_a} on the n^d grid.
class FastDiagonalization {
 public:
  explicit FastDiagonalization(const TensorOperator& op);

  const TensorOperator& op() const { return op_; }
  const Eigen1D& axis_eigen() const { return eig_; }
  /// Kronecker-sum eigenvalue of every tensor mode.
  std::span<const double> eigenvalues() const { return lambda_; }

  /// x = (-Delta_h + alpha I)^{-1} b. Requires alpha > -min eigenvalue.
  void solve(double alpha, std::span<const double> b, std::span<double> x) const;

 private:
  TensorOperator op_;
  Eigen1D eig_;
  AxisMatrix forward_;   // Z^{-1}
  AxisMatrix backward_;  // Z
  std::vector<double> lambda_;
};

/// G_X = (-Delta_h + alpha I)^{-1} for a fixed shift.
class FastSolver {
 public:
  FastSolver(std::shared_ptr<const FastDiagonalization> diag, double alpha);
  FastSolver(const GridSpec& spec, double alpha);

  double alpha() const { return alpha_; }
  std::size_t size() const { return diag_->op().size(); }
  void solve(std::span<const double> b, std::span<double> x) const;
  /// y = (-Delta_h + alpha I) x.
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  std::shared_ptr<const FastDiagonalization> diag_;
  double alpha_;
};

}  // namespace gpflow
