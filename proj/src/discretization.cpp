#include "gpflow/discretization.hpp"

#include <cmath>

#include "gpflow/errors.hpp"

namespace gpflow {

TensorDiscretization::TensorDiscretization(const GridSpec& spec)
    : spec_(spec), diag_(std::make_shared<FastDiagonalization>(TensorOperator(spec))) {}

void TensorDiscretization::apply_laplacian(std::span<const double> in, std::span<double> out) const {
  op().apply_laplacian(in, out);
}

void TensorDiscretization::solve_shifted(double alpha, std::span<const double> b, std::span<double> x) const {
  diag_->solve(alpha, b, x);
}

std::string TensorDiscretization::describe() const {
  const int n = spec_.interior_per_dim();
  std::string grid = std::to_string(n);
  for (int a = 1; a < spec_.dim; ++a) grid += "x" + std::to_string(n);
  return spec_.scheme.name() + " " + grid;
}

double TensorDiscretization::lowest_eigenvalue() const { return spec_.dim * diag_->axis_eigen().mu[0]; }

MeshDiscretization::MeshDiscretization(TriMesh2D mesh) : mesh_(std::move(mesh)) {
  mesh_.validate();
  asm_ = p1_assemble(mesh_);
  monotone_ = mesh_monotonicity_check(mesh_).ok;
}

void MeshDiscretization::apply_laplacian(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = size();
  require_length(n, in.size());
  require_length(n, out.size());
  Eigen::Map<const Eigen::VectorXd> x(in.data(), n);
  Eigen::Map<Eigen::VectorXd> y(out.data(), n);
  y = asm_.stiffness * x;
  for (std::size_t i = 0; i < n; ++i) y[i] /= asm_.weights[i];
}

const MeshDiscretization::Factor& MeshDiscretization::factor(double alpha) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = factors_.find(alpha);
  if (it != factors_.end()) return *it->second;
  Eigen::SparseMatrix<double> a = asm_.stiffness;
  for (std::size_t i = 0; i < size(); ++i) a.coeffRef(i, i) += alpha * asm_.weights[i];
  auto f = std::make_unique<Factor>(a);
  if (f->info() != Eigen::Success) {
    throw ConvergenceError("sparse factorization of S + alpha M failed for alpha = " + std::to_string(alpha));
  }
  return *factors_.emplace(alpha, std::move(f)).first->second;
}

void MeshDiscretization::solve_shifted(double alpha, std::span<const double> b, std::span<double> x) const {
  const std::size_t n = size();
  require_length(n, b.size());
  require_length(n, x.size());
  // (-Delta_h + alpha) x = b  <=>  (S + alpha M) x = M b.
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = asm_.weights[i] * b[i];
  Eigen::Map<Eigen::VectorXd>(x.data(), n) = factor(alpha).solve(rhs);
}

void MeshDiscretization::node(std::size_t i, double* x) const {
  const auto& v = mesh_.vertices[asm_.interior_vertices[i]];
  x[0] = v[0];
  x[1] = v[1];
}

std::string MeshDiscretization::describe() const {
  return "P1 mesh " + std::to_string(mesh_.vertices.size()) + " vertices, " + std::to_string(mesh_.triangles.size()) +
         " triangles";
}

double MeshDiscretization::lowest_eigenvalue() const {
  // Inverse iteration; the lowest mode of a connected Dirichlet problem is simple.
  const std::size_t n = size();
  std::vector<double> u(n, 1.0), v(n), lu(n);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    solve_shifted(0.0, u, v);
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += asm_.weights[i] * v[i] * v[i];
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] / nrm;
    apply_laplacian(u, lu);
    double next = 0.0;
    for (std::size_t i = 0; i < n; ++i) next += asm_.weights[i] * u[i] * lu[i];
    if (it > 0 && std::abs(next - lambda) <= 1e-14 * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

std::shared_ptr<const TensorDiscretization> make_tensor(const GridSpec& spec) {
  return std::make_shared<const TensorDiscretization>(spec);
}

std::shared_ptr<const MeshDiscretization> make_mesh(TriMesh2D mesh) {
  return std::make_shared<const MeshDiscretization>(std::move(mesh));
}

}  // namespace gpflow
