#pragma once

// Data-parallel inner loops used by the tensor operators, the fast solver and
// the energy evaluation. Every kernel has a portable scalar reference and an
// AVX2/FMA variant; the active table is picked once from cpuid and can be
// overridden (tests compare both tables against each other).

#include <cstddef>
#include <string_view>

namespace gpflow::kernels {

struct KernelTable {
  const char* name;

  // C[m x p] = A[m x k] * B[k x p] + beta * C, all row-major with leading
  // dimensions lda/ldb/ldc. beta == 0 overwrites C without reading it.
  void (*gemm)(std::size_t m, std::size_t p, std::size_t k, const double* A, std::size_t lda,
               const double* B, std::size_t ldb, double beta, double* C, std::size_t ldc);

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);

  // sum_i w[i] * x[i] * y[i]
  double (*wdot)(const double* w, const double* x, const double* y, std::size_t n);

  // y = a * x + b * y
  void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);

  // y[i] = d[i] * x[i]
  void (*hadamard)(const double* d, const double* x, double* y, std::size_t n);

  // y[i] = x[i] / (d[i] + shift)
  void (*shifted_divide)(const double* d, double shift, const double* x, double* y,
                         std::size_t n);

  // y[i] += (v[i] + beta * u[i]^2) * x[i]
  void (*add_potential)(const double* v, double beta, const double* u, const double* x, double* y,
                        std::size_t n);

  // sum_i w[i] * u[i]^4
  double (*wquartic)(const double* w, const double* u, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table();

// The table used by the library. Defaults to the widest supported variant.
const KernelTable& active();

// Force a backend by name ("scalar", "avx2", or "auto"). Returns false if the
// requested backend is unavailable; the active table is left unchanged then.
bool select(std::string_view name);

}  // namespace gpflow::kernels
