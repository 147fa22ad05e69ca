#pragma once

#include <span>
#include <vector>

#include "gpflow/grid.hpp"

namespace gpflow {

/// Row-major dense square matrix stored with its transpose, ready for the
/// axis-contraction kernels.
struct AxisMatrix {
  int n = 0;
  std::vector<double> data;       // row-major A
  std::vector<double> transpose;  // row-major A^T

  AxisMatrix() = default;
  explicit AxisMatrix(const Eigen::MatrixXd& m);
};

/// out = beta * out + (A applied along `axis`) in, for a row-major tensor with
/// the given extents (axis 0 slowest). Threads split independent blocks, so
/// results do not depend on the thread count.
void apply_along_axis(const AxisMatrix& a, std::span<const int> extents, int axis,
                      std::span<const double> in, double beta, std::span<double> out);

/// Kronecker-sum operator -Delta_h = sum_axes (I x .. x L_a x .. x I) on n^d
/// interior nodes, with the tensor-product mass matrix. Never materialized.
class TensorOperator {
 public:
  explicit TensorOperator(const GridSpec& spec);
  TensorOperator(Operator1D op, int dim);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  const Operator1D& axis_operator(int axis) const { return ops_[axis]; }
  std::span<const int> extents() const { return extents_; }

  /// Diagonal of the d-dimensional mass matrix (products of 1D weights).
  std::span<const double> weights() const { return weights_; }

  /// out = -Delta_h in.
  void apply_laplacian(std::span<const double> in, std::span<double> out) const;
  /// out = S in, i.e. M (-Delta_h) in.
  void apply_stiffness(std::span<const double> in, std::span<double> out) const;
  /// out = M in.
  void apply_mass(std::span<const double> in, std::span<double> out) const;

  /// Node coordinates of flat index i (first `dim()` entries of `x` written).
  void node(std::size_t i, double* x) const;

 private:
  int dim_;
  int n_;
  std::size_t size_;
  std::vector<Operator1D> ops_;
  std::vector<AxisMatrix> laplacians_;
  std::vector<int> extents_;
  std::vector<double> weights_;
};

}  // namespace gpflow
