#include "gpflow/eigen1d.hpp"

#include <cmath>

#include "gpflow/errors.hpp"
#include "gpflow/kernels.hpp"

namespace gpflow {

Eigen1D generalized_sym_eig(const Operator1D& op) {
  const int n = op.size();
  const Eigen::MatrixXd& s = op.stiffness;
  if (s.rows() != n || s.cols() != n) throw DimensionMismatch(n, s.rows());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw ContractViolation("stiffness matrix is not symmetric");
  }
  for (double w : op.weights) {
    if (!(w > 0.0)) throw ContractViolation("mass weights must be positive");
  }

  Eigen1D e;
  if (op.mass_aux) {
    e.B = *op.mass_aux;
    for (int i = 0; i < n; ++i) e.B.row(i) *= op.weights[i];
    e.B = 0.5 * (e.B + e.B.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(s, e.B);
    if (es.info() != Eigen::Success) throw ConvergenceError("generalized eigensolver failed");
    e.mu = es.eigenvalues();
    e.Z = es.eigenvectors();
  } else {
    Eigen::VectorXd isq(n);
    for (int i = 0; i < n; ++i) isq[i] = 1.0 / std::sqrt(op.weights[i]);
    const Eigen::MatrixXd c = isq.asDiagonal() * s * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (c + c.transpose()));
    if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
    e.mu = es.eigenvalues();
    e.Z = isq.asDiagonal() * es.eigenvectors();
    e.B = Eigen::VectorXd::Map(op.weights.data(), n).asDiagonal();
  }
  e.Zinv = e.Z.transpose() * e.B;
  return e;
}

FastDiagonalization::FastDiagonalization(const TensorOperator& op)
    : op_(op), eig_(generalized_sym_eig(op.axis_operator(0))), forward_(eig_.Zinv), backward_(eig_.Z) {
  const std::size_t size = op_.size();
  const int n = op_.n();
  lambda_.assign(size, 0.0);
  std::size_t stride = size;
  for (int a = 0; a < op_.dim(); ++a) {
    stride /= n;
    for (std::size_t i = 0; i < size; ++i) lambda_[i] += eig_.mu[(i / stride) % n];
  }
}

void FastDiagonalization::solve(double alpha, std::span<const double> b, std::span<double> x) const {
  const std::size_t size = op_.size();
  require_length(size, b.size());
  require_length(size, x.size());
  const auto ext = op_.extents();
  const int d = op_.dim();
  std::vector<double> t0(b.begin(), b.end()), t1(size);
  // Ping-pong between t0 and t1 for the forward transforms, then back.
  std::vector<double>* cur = &t0;
  std::vector<double>* nxt = &t1;
  for (int a = 0; a < d; ++a) {
    apply_along_axis(forward_, ext, a, *cur, 0.0, *nxt);
    std::swap(cur, nxt);
  }
  kernels::active().shifted_divide(lambda_.data(), alpha, cur->data(), cur->data(), size);
  for (int a = 0; a < d; ++a) {
    const bool last = a + 1 == d;
    if (last) {
      apply_along_axis(backward_, ext, a, *cur, 0.0, x);
    } else {
      apply_along_axis(backward_, ext, a, *cur, 0.0, *nxt);
      std::swap(cur, nxt);
    }
  }
}

FastSolver::FastSolver(std::shared_ptr<const FastDiagonalization> diag, double alpha)
    : diag_(std::move(diag)), alpha_(alpha) {
  if (!diag_) throw InvalidArgument("fast solver needs a diagonalization");
  if (!(alpha_ + diag_->axis_eigen().mu[0] * diag_->op().dim() > 0.0)) {
    throw InvalidArgument("shifted operator is singular for alpha = " + std::to_string(alpha_));
  }
}

FastSolver::FastSolver(const GridSpec& spec, double alpha)
    : FastSolver(std::make_shared<FastDiagonalization>(TensorOperator(spec)), alpha) {}

void FastSolver::solve(std::span<const double> b, std::span<double> x) const { diag_->solve(alpha_, b, x); }

void FastSolver::apply(std::span<const double> x, std::span<double> y) const {
  diag_->op().apply_laplacian(x, y);
  kernels::active().axpby(alpha_, x.data(), 1.0, y.data(), x.size());
}

}  // namespace gpflow
