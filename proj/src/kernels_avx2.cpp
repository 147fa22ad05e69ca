#include "gpflow/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#define GPFLOW_HAVE_AVX2 1
#include <immintrin.h>
#else
#define GPFLOW_HAVE_AVX2 0
#endif

namespace gpflow::kernels {

#if GPFLOW_HAVE_AVX2
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline void store_tile(double* c, __m256d acc, __m256d vbeta, double beta) {
  if (beta == 0.0) {
    _mm256_storeu_pd(c, acc);
  } else {
    _mm256_storeu_pd(c, _mm256_fmadd_pd(vbeta, _mm256_loadu_pd(c), acc));
  }
}

template <int Rows, int Width>
inline void tile(std::size_t k, const double* A, std::size_t lda, const double* B, std::size_t ldb,
                 double beta, double* C, std::size_t ldc) {
  constexpr int V = Width / 4;
  __m256d acc[Rows][V];
  for (int r = 0; r < Rows; ++r)
    for (int v = 0; v < V; ++v) acc[r][v] = _mm256_setzero_pd();
  const double* b = B;
  for (std::size_t l = 0; l < k; ++l, b += ldb) {
    __m256d bv[V];
    for (int v = 0; v < V; ++v) bv[v] = _mm256_loadu_pd(b + 4 * v);
    for (int r = 0; r < Rows; ++r) {
      const __m256d a = _mm256_broadcast_sd(A + r * lda + l);
      for (int v = 0; v < V; ++v) acc[r][v] = _mm256_fmadd_pd(a, bv[v], acc[r][v]);
    }
  }
  const __m256d vbeta = _mm256_set1_pd(beta);
  for (int r = 0; r < Rows; ++r)
    for (int v = 0; v < V; ++v) store_tile(C + r * ldc + 4 * v, acc[r][v], vbeta, beta);
}

template <int Width>
inline void column_panel(std::size_t m, std::size_t k, const double* A, std::size_t lda,
                         const double* B, std::size_t ldb, double beta, double* C,
                         std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) tile<4, Width>(k, A + i * lda, lda, B, ldb, beta, C + i * ldc, ldc);
  for (; i < m; ++i) tile<1, Width>(k, A + i * lda, lda, B, ldb, beta, C + i * ldc, ldc);
}

// Column panels outermost so one k x 8 panel of B stays in L1 while every row
// block of A streams over it.
void gemm_avx2(std::size_t m, std::size_t p, std::size_t k, const double* A, std::size_t lda,
               const double* B, std::size_t ldb, double beta, double* C, std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 8 <= p; j += 8) column_panel<8>(m, k, A, lda, B + j, ldb, beta, C + j, ldc);
  for (; j + 4 <= p; j += 4) column_panel<4>(m, k, A, lda, B + j, ldb, beta, C + j, ldc);
  for (; j < p; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* a = A + i * lda;
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += a[l] * B[l * ldb + j];
      double& c = C[i * ldc + j];
      c = (beta == 0.0) ? s : s + beta * c;
    }
  }
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double wdot_avx2(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i));
    const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(x + i + 4));
    s0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(y + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += w[i] * x[i] * y[i];
  return s;
}

void axpby_avx2(double a, const double* x, double b, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  if (b == 0.0) {
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = a * x[i];
    return;
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void hadamard_avx2(const double* d, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = d[i] * x[i];
}

void shifted_divide_avx2(const double* d, double shift, const double* x, double* y,
                         std::size_t n) {
  const __m256d vs = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d den = _mm256_add_pd(_mm256_loadu_pd(d + i), vs);
    _mm256_storeu_pd(y + i, _mm256_div_pd(_mm256_loadu_pd(x + i), den));
  }
  for (; i < n; ++i) y[i] = x[i] / (d[i] + shift);
}

void add_potential_avx2(const double* v, double beta, const double* u, const double* x, double* y,
                        std::size_t n) {
  const __m256d vbeta = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d uu = _mm256_loadu_pd(u + i);
    const __m256d coef = _mm256_fmadd_pd(vbeta, _mm256_mul_pd(uu, uu), _mm256_loadu_pd(v + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(coef, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += (v[i] + beta * u[i] * u[i]) * x[i];
}

double wquartic_avx2(const double* w, const double* u, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d uu = _mm256_loadu_pd(u + i);
    const __m256d u2 = _mm256_mul_pd(uu, uu);
    s = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), u2), u2, s);
  }
  double r = hsum(s);
  for (; i < n; ++i) {
    const double u2 = u[i] * u[i];
    r += w[i] * u2 * u2;
  }
  return r;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{
      "avx2",       gemm_avx2,          dot_avx2,           wdot_avx2,     axpby_avx2,
      hadamard_avx2, shifted_divide_avx2, add_potential_avx2, wquartic_avx2,
  };
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace gpflow::kernels
