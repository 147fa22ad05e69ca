#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>

#include <Eigen/SparseCholesky>

#include "gpflow/eigen1d.hpp"
#include "gpflow/grid.hpp"
#include "gpflow/tensor.hpp"
#include "gpflow/trimesh.hpp"

namespace gpflow {

/// What the energy and flow layers need from a spatial discretization: a
/// diagonal mass, the discrete Laplacian, and shifted inverse solves.
class Discretization {
 public:
  virtual ~Discretization() = default;

  virtual std::size_t size() const = 0;
  virtual int dim() const = 0;
  /// Diagonal of M.
  virtual std::span<const double> weights() const = 0;
  /// out = -Delta_h in.
  virtual void apply_laplacian(std::span<const double> in, std::span<double> out) const = 0;
  /// x = (-Delta_h + alpha I)^{-1} b.
  virtual void solve_shifted(double alpha, std::span<const double> b, std::span<double> x) const = 0;
  /// Coordinates of unknown i (dim() entries).
  virtual void node(std::size_t i, double* x) const = 0;
  /// True when -Delta_h is an M-matrix scheme (FD2, SEM(1), P1 with the edge condition).
  virtual bool monotone() const = 0;
  virtual std::string describe() const = 0;
  /// Smallest eigenvalue of -Delta_h.
  virtual double lowest_eigenvalue() const = 0;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

/// Tensor-product grid (FD2, COMPACT4, SEM(k)) with the fast diagonalization solver.
class TensorDiscretization final : public Discretization {
 public:
  explicit TensorDiscretization(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  const TensorOperator& op() const { return diag_->op(); }
  std::shared_ptr<const FastDiagonalization> diagonalization() const { return diag_; }

  std::size_t size() const override { return op().size(); }
  int dim() const override { return spec_.dim; }
  std::span<const double> weights() const override { return op().weights(); }
  void apply_laplacian(std::span<const double> in, std::span<double> out) const override;
  void solve_shifted(double alpha, std::span<const double> b, std::span<double> x) const override;
  void node(std::size_t i, double* x) const override { op().node(i, x); }
  bool monotone() const override { return spec_.scheme.monotone(); }
  std::string describe() const override;
  double lowest_eigenvalue() const override;

 private:
  GridSpec spec_;
  std::shared_ptr<const FastDiagonalization> diag_;
};

/// P1 elements with lumped mass on a 2D triangular mesh. Shifted solves use a
/// sparse Cholesky factorization of S + alpha M, cached per shift.
class MeshDiscretization final : public Discretization {
 public:
  explicit MeshDiscretization(TriMesh2D mesh);

  const TriMesh2D& mesh() const { return mesh_; }
  const AssembledOperator& assembled() const { return asm_; }

  std::size_t size() const override { return asm_.weights.size(); }
  int dim() const override { return 2; }
  std::span<const double> weights() const override { return asm_.weights; }
  void apply_laplacian(std::span<const double> in, std::span<double> out) const override;
  void solve_shifted(double alpha, std::span<const double> b, std::span<double> x) const override;
  void node(std::size_t i, double* x) const override;
  bool monotone() const override { return monotone_; }
  std::string describe() const override;
  double lowest_eigenvalue() const override;

 private:
  using Factor = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;
  const Factor& factor(double alpha) const;

  TriMesh2D mesh_;
  AssembledOperator asm_;
  bool monotone_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::unique_ptr<Factor>> factors_;
};

std::shared_ptr<const TensorDiscretization> make_tensor(const GridSpec& spec);
std::shared_ptr<const MeshDiscretization> make_mesh(TriMesh2D mesh);

}  // namespace gpflow
