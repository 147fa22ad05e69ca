#include "gpflow/kernels.hpp"

namespace gpflow::kernels {
namespace {

void gemm_scalar(std::size_t m, std::size_t p, std::size_t k, const double* A, std::size_t lda,
                 const double* B, std::size_t ldb, double beta, double* C, std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c = C + i * ldc;
    if (beta == 0.0) {
      for (std::size_t j = 0; j < p; ++j) c[j] = 0.0;
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < p; ++j) c[j] *= beta;
    }
    const double* a = A + i * lda;
    for (std::size_t l = 0; l < k; ++l) {
      const double s = a[l];
      if (s == 0.0) continue;
      const double* b = B + l * ldb;
      for (std::size_t j = 0; j < p; ++j) c[j] += s * b[j];
    }
  }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_scalar(const double* w, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
  if (b == 0.0) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
  }
}

void hadamard_scalar(const double* d, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

void shifted_divide_scalar(const double* d, double shift, const double* x, double* y,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / (d[i] + shift);
}

void add_potential_scalar(const double* v, double beta, const double* u, const double* x,
                          double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += (v[i] + beta * u[i] * u[i]) * x[i];
}

double wquartic_scalar(const double* w, const double* u, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u2 = u[i] * u[i];
    s += w[i] * u2 * u2;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",          gemm_scalar,           dot_scalar,     wdot_scalar,
      axpby_scalar,      hadamard_scalar,       shifted_divide_scalar,
      add_potential_scalar, wquartic_scalar,
  };
  return table;
}

}  // namespace gpflow::kernels
