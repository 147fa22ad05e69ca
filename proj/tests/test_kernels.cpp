#include <doctest.h>

#include <random>

#include "gpflow/kernels.hpp"
#include "oracles.hpp"

using gpflow::kernels::KernelTable;

namespace {

const KernelTable* avx2_or_skip() {
  const KernelTable* t = gpflow::kernels::avx2_table();
  if (!t) MESSAGE("AVX2 kernels unavailable on this CPU; equivalence not exercised");
  return t;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("reductions agree between scalar and avx2 for every tail length") {
  const KernelTable* v = avx2_or_skip();
  if (!v) return;
  const KernelTable& s = gpflow::kernels::scalar_table();
  std::mt19937_64 rng(1);
  for (std::size_t n = 0; n <= 67; ++n) {
    auto x = oracle::random_vector(n, rng), y = oracle::random_vector(n, rng), w = oracle::random_vector(n, rng, 0.1, 2.0);
    CHECK(rel(v->dot(x.data(), y.data(), n), s.dot(x.data(), y.data(), n)) < 1e-14);
    CHECK(rel(v->wdot(w.data(), x.data(), y.data(), n), s.wdot(w.data(), x.data(), y.data(), n)) < 1e-14);
    CHECK(rel(v->wquartic(w.data(), x.data(), n), s.wquartic(w.data(), x.data(), n)) < 1e-14);
  }
}

TEST_CASE("elementwise kernels agree between scalar and avx2") {
  const KernelTable* v = avx2_or_skip();
  if (!v) return;
  const KernelTable& s = gpflow::kernels::scalar_table();
  std::mt19937_64 rng(2);
  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 17u, 64u, 101u}) {
    auto x = oracle::random_vector(n, rng), y = oracle::random_vector(n, rng);
    auto d = oracle::random_vector(n, rng, 0.5, 3.0), u = oracle::random_vector(n, rng);

    auto y1 = y, y2 = y;
    s.axpby(0.3, x.data(), -1.7, y1.data(), n);
    v->axpby(0.3, x.data(), -1.7, y2.data(), n);
    CHECK(oracle::max_abs_diff(y1, y2) < 1e-15);

    s.hadamard(d.data(), x.data(), y1.data(), n);
    v->hadamard(d.data(), x.data(), y2.data(), n);
    CHECK(oracle::max_abs_diff(y1, y2) == 0.0);

    s.shifted_divide(d.data(), 0.25, x.data(), y1.data(), n);
    v->shifted_divide(d.data(), 0.25, x.data(), y2.data(), n);
    CHECK(oracle::max_abs_diff(y1, y2) < 1e-15);

    y1 = y2 = y;
    s.add_potential(d.data(), 4.0, u.data(), x.data(), y1.data(), n);
    v->add_potential(d.data(), 4.0, u.data(), x.data(), y2.data(), n);
    CHECK(oracle::max_abs_diff(y1, y2) < 1e-14);
  }
}

TEST_CASE("gemm agrees between scalar, avx2 and Eigen on ragged shapes") {
  const KernelTable& s = gpflow::kernels::scalar_table();
  const KernelTable* v = gpflow::kernels::avx2_table();
  std::mt19937_64 rng(3);
  for (auto [m, p, k] : {std::array<std::size_t, 3>{1, 1, 1}, {3, 5, 7}, {8, 8, 8}, {13, 4, 9}, {31, 33, 17}, {5, 64, 40}}) {
    auto a = oracle::random_vector(m * k, rng), b = oracle::random_vector(k * p, rng), c0 = oracle::random_vector(m * p, rng);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(a.data(), m, k), B(b.data(), k, p),
        C0(c0.data(), m, p);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ref = A * B + 0.5 * C0;
    std::span<const double> want(ref.data(), m * p);

    auto c1 = c0;
    s.gemm(m, p, k, a.data(), k, b.data(), p, 0.5, c1.data(), p);
    CHECK(oracle::max_abs_diff(c1, want) < 1e-13);
    if (v) {
      auto c2 = c0;
      v->gemm(m, p, k, a.data(), k, b.data(), p, 0.5, c2.data(), p);
      CHECK(oracle::max_abs_diff(c2, want) < 1e-13);
      // beta == 0 must not read C (NaN garbage stays out).
      std::vector<double> c3(m * p, std::numeric_limits<double>::quiet_NaN());
      v->gemm(m, p, k, a.data(), k, b.data(), p, 0.0, c3.data(), p);
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ab = A * B;
      CHECK(oracle::max_abs_diff(c3, std::span<const double>(ab.data(), m * p)) < 1e-13);
    }
  }
}

TEST_CASE("backend selection") {
  CHECK(gpflow::kernels::select("scalar"));
  CHECK(std::string(gpflow::kernels::active().name) == "scalar");
  CHECK_FALSE(gpflow::kernels::select("sse9"));
  CHECK(std::string(gpflow::kernels::active().name) == "scalar");
  CHECK(gpflow::kernels::select("auto"));
  if (gpflow::kernels::avx2_table()) CHECK(std::string(gpflow::kernels::active().name) == "avx2");
}
