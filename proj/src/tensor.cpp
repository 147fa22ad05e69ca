#include "gpflow/tensor.hpp"

#include <algorithm>

#include "gpflow/errors.hpp"
#include "gpflow/kernels.hpp"

namespace gpflow {

AxisMatrix::AxisMatrix(const Eigen::MatrixXd& m)
    : n(static_cast<int>(m.rows())), data(m.size()), transpose(m.size()) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      data[i * n + j] = m(i, j);
      transpose[j * n + i] = m(i, j);
    }
  }
}

void apply_along_axis(const AxisMatrix& a, std::span<const int> extents, int axis,
                      std::span<const double> in, double beta, std::span<double> out) {
  std::size_t outer = 1, inner = 1, total = 1;
  for (int b = 0; b < static_cast<int>(extents.size()); ++b) {
    total *= extents[b];
    if (b < axis) outer *= extents[b];
    if (b > axis) inner *= extents[b];
  }
  require_length(total, in.size());
  require_length(total, out.size());
  if (a.n != extents[axis]) throw DimensionMismatch(extents[axis], a.n);

  const auto& k = kernels::active();
  const std::size_t n = a.n;
  const double* src = in.data();
  double* dst = out.data();

  if (inner == 1) {
    // Last axis: OUT (outer x n) = IN (outer x n) * A^T.
    constexpr std::size_t chunk = 64;
    const std::ptrdiff_t nchunks = static_cast<std::ptrdiff_t>((outer + chunk - 1) / chunk);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
      const std::size_t r0 = c * chunk;
      const std::size_t rows = std::min(chunk, outer - r0);
      k.gemm(rows, n, n, src + r0 * n, n, a.transpose.data(), n, beta, dst + r0 * n, n);
    }
  } else if (outer == 1) {
    // First axis: OUT (n x inner) = A * IN (n x inner), split over columns.
    constexpr std::size_t chunk = 256;
    const std::ptrdiff_t nchunks = static_cast<std::ptrdiff_t>((inner + chunk - 1) / chunk);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
      const std::size_t c0 = c * chunk;
      const std::size_t cols = std::min(chunk, inner - c0);
      k.gemm(n, cols, n, a.data.data(), n, src + c0, inner, beta, dst + c0, inner);
    }
  } else {
    const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(outer);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t o = 0; o < blocks; ++o) {
      const std::size_t off = o * n * inner;
      k.gemm(n, inner, n, a.data.data(), n, src + off, inner, beta, dst + off, inner);
    }
  }
}

TensorOperator::TensorOperator(const GridSpec& spec) : TensorOperator(build_1d(spec), spec.dim) {}

TensorOperator::TensorOperator(Operator1D op, int dim) : dim_(dim), n_(op.size()) {
  if (dim < 1 || dim > 3) throw InvalidArgument("tensor operator dimension must be 1, 2 or 3");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n_);
  extents_.assign(dim, n_);
  const AxisMatrix lap(op.laplacian());
  ops_.assign(dim, op);
  laplacians_.assign(dim, lap);

  weights_.assign(size_, 1.0);
  std::size_t stride = size_;
  for (int a = 0; a < dim; ++a) {
    stride /= n_;
    for (std::size_t i = 0; i < size_; ++i) weights_[i] *= op.weights[(i / stride) % n_];
  }
}

void TensorOperator::apply_laplacian(std::span<const double> in, std::span<double> out) const {
  require_length(size_, in.size());
  require_length(size_, out.size());
  for (int a = 0; a < dim_; ++a) apply_along_axis(laplacians_[a], extents_, a, in, a == 0 ? 0.0 : 1.0, out);
}

void TensorOperator::apply_stiffness(std::span<const double> in, std::span<double> out) const {
  apply_laplacian(in, out);
  kernels::active().hadamard(weights_.data(), out.data(), out.data(), size_);
}

void TensorOperator::apply_mass(std::span<const double> in, std::span<double> out) const {
  require_length(size_, in.size());
  require_length(size_, out.size());
  kernels::active().hadamard(weights_.data(), in.data(), out.data(), size_);
}

void TensorOperator::node(std::size_t i, double* x) const {
  std::size_t stride = size_;
  for (int a = 0; a < dim_; ++a) {
    stride /= n_;
    x[a] = ops_[a].nodes[(i / stride) % n_];
  }
}

}  // namespace gpflow
