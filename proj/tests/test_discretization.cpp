#include <doctest.h>

#include <numbers>
#include <omp.h>
#include <random>
#include <sstream>

#include "gpflow/errors.hpp"
#include "gpflow/grid.hpp"
#include "gpflow/quadrature.hpp"
#include "gpflow/tensor.hpp"
#include "gpflow/trimesh.hpp"
#include "oracles.hpp"

using namespace gpflow;

namespace {

// Lagrange basis on `nodes` in monomial coefficients, from the Vandermonde system.
Eigen::MatrixXd lagrange_coefficients(const std::vector<double>& nodes) {
  const int m = static_cast<int>(nodes.size());
  Eigen::MatrixXd v(m, m);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < m; ++p) v(i, p) = std::pow(nodes[i], p);
  return v.fullPivLu().inverse();  // column j = coefficients of l_j
}

// Element stiffness on [-1, 1] by exact monomial integration of l_a' l_b'.
Eigen::MatrixXd exact_element_stiffness(const std::vector<double>& nodes) {
  const Eigen::MatrixXd c = lagrange_coefficients(nodes);
  const int m = static_cast<int>(nodes.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int p = 1; p < m; ++p)
        for (int q = 1; q < m; ++q) {
          const int deg = p + q - 2;
          if (deg % 2 == 0) k(a, b) += p * c(p, a) * q * c(q, b) * 2.0 / (deg + 1);
        }
  return k;
}

// Global SEM(k) stiffness and lumped weights over interior nodes, assembled from the oracle above.
std::pair<Eigen::MatrixXd, std::vector<double>> sem_oracle(int k, int cells, double half_width) {
  const QuadratureRule rule = gauss_lobatto_rule(k);
  const double h = 2.0 * half_width / cells;
  const Eigen::MatrixXd ke = exact_element_stiffness(rule.nodes) * (2.0 / h);
  const int total = cells * k + 1;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(total, total);
  std::vector<double> w(total, 0.0);
  for (int e = 0; e < cells; ++e) {
    for (int a = 0; a <= k; ++a) {
      w[e * k + a] += rule.weights[a] * h / 2.0;
      for (int b = 0; b <= k; ++b) s(e * k + a, e * k + b) += ke(a, b);
    }
  }
  return {s.block(1, 1, total - 2, total - 2), std::vector<double>(w.begin() + 1, w.end() - 1)};
}

double moment(const QuadratureRule& r, int p) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
  return s;
}

Eigen::MatrixXd to_dense(const SparseMatrix& s) { return Eigen::MatrixXd(s); }

}  // namespace

TEST_CASE("Gauss-Lobatto rules") {
  SUBCASE("k = 1 is the trapezoid rule") {
    const auto r = gauss_lobatto_rule(1);
    CHECK(r.nodes == std::vector<double>{-1.0, 1.0});
    CHECK(r.weights == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("k = 2 is Simpson's rule") {
    const auto r = gauss_lobatto_rule(2);
    REQUIRE(r.nodes.size() == 3);
    CHECK(r.nodes[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(r.weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("k = 4 interior nodes are the roots of P4'") {
    const auto r = gauss_lobatto_rule(4);
    REQUIRE(r.nodes.size() == 5);
    const double s = std::sqrt(3.0 / 7.0);
    CHECK(std::abs(r.nodes[1] + s) < 1e-15);
    CHECK(std::abs(r.nodes[2]) < 1e-15);
    CHECK(std::abs(r.nodes[3] - s) < 1e-15);
  }
  SUBCASE("exact through degree 2k-1, inexact at 2k") {
    for (int k = 1; k <= 12; ++k) {
      const auto r = gauss_lobatto_rule(k);
      double wsum = 0.0;
      for (double w : r.weights) {
        CHECK(w > 0.0);
        wsum += w;
      }
      CHECK(std::abs(wsum - 2.0) < 1e-14);
      for (int p = 0; p <= 2 * k - 1; ++p) {
        const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
        CHECK(std::abs(moment(r, p) - exact) <= 1e-14 * std::max(1.0, exact));
      }
      CHECK(std::abs(moment(r, 2 * k) - 2.0 / (2 * k + 1)) > 1e-10);
    }
  }
  CHECK_THROWS_AS(gauss_lobatto_rule(0), InvalidArgument);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((GridSpec{0.0, 1, 4, Scheme::fd2()}.validate()), InvalidArgument);
  CHECK_THROWS_AS((GridSpec{1.0, 4, 4, Scheme::fd2()}.validate()), InvalidArgument);
  CHECK_THROWS_AS((GridSpec{1.0, 1, 1, Scheme::fd2()}.validate()), InvalidArgument);
  CHECK_THROWS_AS(Scheme::parse("SEM(0)"), InvalidArgument);
  CHECK_THROWS_AS(Scheme::parse("spline"), InvalidArgument);
  CHECK(Scheme::parse("sem(3)") == Scheme::sem(3));
  CHECK(Scheme::parse("Q5") == Scheme::sem(5));
  CHECK(Scheme::parse("compact4") == Scheme::compact4());
  CHECK((GridSpec{1.0, 3, 5, Scheme::sem(2)}.interior_per_dim()) == 9);
  CHECK((GridSpec{1.0, 3, 40, Scheme::fd2()}.size()) == 39u * 39u * 39u);
}

TEST_CASE("build_1d FD2 on four cells") {
  const Operator1D op = build_1d({1.0, 1, 4, Scheme::fd2()});
  Eigen::MatrixXd want(3, 3);
  want << 4, -2, 0, -2, 4, -2, 0, -2, 4;
  CHECK((op.stiffness - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(op.weights == std::vector<double>{0.5, 0.5, 0.5});
  CHECK(op.nodes == std::vector<double>{-0.5, 0.0, 0.5});
  CHECK_FALSE(op.mass_aux.has_value());
}

TEST_CASE("SEM(1) reproduces FD2") {
  for (int cells : {2, 5, 17}) {
    const Operator1D a = build_1d({1.3, 1, cells, Scheme::fd2()});
    const Operator1D b = build_1d({1.3, 1, cells, Scheme::sem(1)});
    REQUIRE(a.size() == b.size());
    CHECK((a.stiffness - b.stiffness).cwiseAbs().maxCoeff() <= 1e-15 * a.stiffness.cwiseAbs().maxCoeff());
    CHECK(oracle::max_abs_diff(a.weights, b.weights) <= 1e-15);
    CHECK(oracle::max_abs_diff(a.nodes, b.nodes) <= 1e-15);
  }
}

TEST_CASE("SEM(k) stiffness matches exact integration of Lagrange gradients") {
  for (int k : {2, 3, 5}) {
    for (int cells : {2, 3}) {
      const Operator1D op = build_1d({1.0, 1, cells, Scheme::sem(k)});
      const auto [s, w] = sem_oracle(k, cells, 1.0);
      const double scale = s.cwiseAbs().maxCoeff();
      CHECK((op.stiffness - s).cwiseAbs().maxCoeff() <= 1e-13 * scale);
      CHECK(oracle::max_abs_diff(op.weights, w) <= 1e-14);
    }
  }
}

TEST_CASE("1D operators are symmetric, PSD and positive-weighted for every scheme") {
  std::mt19937_64 rng(5);
  for (Scheme s : {Scheme::fd2(), Scheme::compact4(), Scheme::sem(1), Scheme::sem(2), Scheme::sem(4), Scheme::sem(8)}) {
    const Operator1D op = build_1d({2.0, 1, 6, s});
    CHECK(op.stiffness == op.stiffness.transpose());
    for (double w : op.weights) CHECK(w > 0.0);
    for (int t = 0; t < 20; ++t) {
      const auto u = oracle::random_vector(op.size(), rng);
      Eigen::Map<const Eigen::VectorXd> x(u.data(), op.size());
      CHECK(x.dot(op.stiffness * x) >= -1e-12 * x.squaredNorm());
    }
    if (s.kind == SchemeKind::FD2) {
      for (int i = 0; i < op.size(); ++i)
        for (int j = 0; j < op.size(); ++j)
          if (i != j) CHECK(op.stiffness(i, j) <= 0.0);
    }
  }
}

TEST_CASE("COMPACT4 carries the Pade mass") {
  const Operator1D op = build_1d({1.0, 1, 8, Scheme::compact4()});
  REQUIRE(op.mass_aux.has_value());
  const Eigen::MatrixXd& t = *op.mass_aux;
  CHECK(t(0, 0) == doctest::Approx(10.0 / 12.0));
  CHECK(t(3, 4) == doctest::Approx(1.0 / 12.0));
  CHECK(t(0, 2) == 0.0);
  const Operator1D fd = build_1d({1.0, 1, 8, Scheme::fd2()});
  CHECK(op.stiffness == fd.stiffness);
  // -Delta_h = T^{-1} M^{-1} S
  Eigen::MatrixXd mis = fd.stiffness;
  for (int i = 0; i < mis.rows(); ++i) mis.row(i) /= fd.weights[i];
  CHECK((op.laplacian() - t.inverse() * mis).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tensor operator") {
  SUBCASE("d = 2 FD2: rank-1 sine mode scales by mu1 + mu1") {
    const TensorOperator op(GridSpec{1.0, 2, 4, Scheme::fd2()});
    const int n = op.n();
    const double h = 0.5;
    std::vector<double> u(op.size()), out(op.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        u[i * n + j] = std::sin(std::numbers::pi * (i + 1) * h / 2.0) * std::sin(std::numbers::pi * (j + 1) * h / 2.0);
    op.apply_laplacian(u, out);
    const double mu = oracle::fd2_mu(1, h);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(out[i] - 2.0 * mu * u[i]) < 1e-13);
  }
  SUBCASE("d = 3 apply equals the dense Kronecker sum") {
    for (Scheme s : {Scheme::fd2(), Scheme::compact4(), Scheme::sem(2)}) {
      const GridSpec spec{1.0, 3, s.kind == SchemeKind::SEM ? 2 : 3, s};
      const TensorOperator op(spec);
      const Eigen::MatrixXd want = oracle::kron_sum(op.axis_operator(0).laplacian(), 3);
      const Eigen::MatrixXd got =
          oracle::dense([&](std::span<const double> x, std::span<double> y) { op.apply_laplacian(x, y); }, op.size());
      CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-13 * want.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("d = 1 apply is M^{-1} S") {
    std::mt19937_64 rng(7);
    const TensorOperator op(GridSpec{1.0, 1, 9, Scheme::sem(3)});
    const auto u = oracle::random_vector(op.size(), rng);
    std::vector<double> out(op.size()), su(op.size());
    op.apply_laplacian(u, out);
    op.apply_stiffness(u, su);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(out[i] - su[i] / op.weights()[i]) < 1e-12);
  }
  SUBCASE("length mismatch") {
    const TensorOperator op(GridSpec{1.0, 2, 4, Scheme::fd2()});
    std::vector<double> u(5), out(op.size());
    CHECK_THROWS_AS(op.apply_laplacian(u, out), DimensionMismatch);
  }
  SUBCASE("results do not depend on the thread count") {
    std::mt19937_64 rng(8);
    const TensorOperator op(GridSpec{1.0, 3, 12, Scheme::sem(2)});
    const auto u = oracle::random_vector(op.size(), rng);
    std::vector<double> a(op.size()), b(op.size());
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    op.apply_laplacian(u, a);
    omp_set_num_threads(4);
    op.apply_laplacian(u, b);
    omp_set_num_threads(saved);
    CHECK(oracle::max_abs_diff(a, b) <= 1e-13 * oracle::max_abs(a));
  }
}

TEST_CASE("P1 on the structured right-triangle mesh is the 5-point stencil") {
  const TriMesh2D mesh = structured_mesh(4);
  const AssembledOperator a = p1_assemble(mesh);
  const Eigen::MatrixXd t = (Eigen::MatrixXd(3, 3) << 2, -1, 0, -1, 2, -1, 0, -1, 2).finished();
  const Eigen::MatrixXd want = oracle::kron_sum(t, 2);
  CHECK((to_dense(a.stiffness) - want).cwiseAbs().maxCoeff() < 1e-14);
  for (double w : a.weights) CHECK(w == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  const Eigen::VectorXd rows = to_dense(a.full_stiffness).rowwise().sum();
  CHECK(rows.cwiseAbs().maxCoeff() < 1e-14);

  const auto report = mesh_monotonicity_check(mesh);
  CHECK(report.ok);
  CHECK(report.worst_value >= 0.0);
}

TEST_CASE("P1 on a regular six-triangle fan") {
  TriMesh2D mesh;
  mesh.vertices.push_back({0.0, 0.0});
  mesh.boundary.push_back(0);
  for (int i = 0; i < 6; ++i) {
    mesh.vertices.push_back({std::cos(i * std::numbers::pi / 3.0), std::sin(i * std::numbers::pi / 3.0)});
    mesh.boundary.push_back(1);
  }
  for (int i = 0; i < 6; ++i) mesh.triangles.push_back({0, 1 + i, 1 + (i + 1) % 6});
  mesh.validate();
  const AssembledOperator a = p1_assemble(mesh);
  REQUIRE(a.stiffness.rows() == 1);
  // Each spoke sees two 60 degree angles: weight (cot 60 + cot 60) / 2 = 1/sqrt(3).
  CHECK(a.stiffness.coeff(0, 0) == doctest::Approx(6.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(a.weights[0] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  const Eigen::MatrixXd full = to_dense(a.full_stiffness);
  for (int j = 1; j <= 6; ++j) CHECK(full(0, j) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(full.row(0).sum()) < 1e-14);
}

TEST_CASE("an edge with two 100 degree opposite angles fails the monotonicity check") {
  const double t = 1.0 / std::tan(50.0 * std::numbers::pi / 180.0);
  TriMesh2D mesh;
  mesh.vertices = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, t}, {0.0, -t}};
  mesh.boundary = {0, 1, 1, 1};
  mesh.triangles = {{0, 1, 2}, {1, 0, 3}};
  mesh.validate();
  const auto report = mesh_monotonicity_check(mesh);
  CHECK_FALSE(report.ok);
  CHECK(report.worst_edge == std::pair<int, int>{0, 1});
  CHECK(report.worst_value == doctest::Approx(2.0 / std::tan(100.0 * std::numbers::pi / 180.0)).epsilon(1e-12));
}

TEST_CASE("Delaunay meshes of random points satisfy the edge condition") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.02, 0.98);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::array<double, 2>> pts;
    std::vector<std::uint8_t> flags;
    for (int i = 0; i <= 8; ++i) {
      const double s = i / 8.0;
      for (auto p : {std::array<double, 2>{s, 0.0}, {s, 1.0}}) pts.push_back(p), flags.push_back(1);
      if (i > 0 && i < 8)
        for (auto p : {std::array<double, 2>{0.0, s}, {1.0, s}}) pts.push_back(p), flags.push_back(1);
    }
    for (int i = 0; i < 60; ++i) pts.push_back({uni(rng), uni(rng)}), flags.push_back(0);
    const TriMesh2D mesh = delaunay_mesh(pts, flags);
    mesh.validate();
    CHECK(mesh_monotonicity_check(mesh).ok);
    const AssembledOperator a = p1_assemble(mesh);
    const Eigen::MatrixXd s = to_dense(a.stiffness);
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < 100; ++k) {
      const auto u = oracle::random_vector(s.rows(), rng);
      Eigen::Map<const Eigen::VectorXd> x(u.data(), s.rows());
      CHECK(x.dot(s * x) >= -1e-12 * x.squaredNorm());
    }
  }
}

TEST_CASE("P1 edge form equals v^T S u") {
  std::mt19937_64 rng(12);
  const TriMesh2D mesh = structured_mesh(7, -1.0, 1.0);
  const AssembledOperator a = p1_assemble(mesh);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> u(mesh.vertices.size(), 0.0), v(mesh.vertices.size(), 0.0);
    const auto ui = oracle::random_vector(a.weights.size(), rng), vi = oracle::random_vector(a.weights.size(), rng);
    for (std::size_t k = 0; k < ui.size(); ++k) {
      u[a.interior_vertices[k]] = ui[k];
      v[a.interior_vertices[k]] = vi[k];
    }
    Eigen::Map<const Eigen::VectorXd> x(ui.data(), ui.size()), y(vi.data(), vi.size());
    const double want = y.dot(a.stiffness * x);
    CHECK(std::abs(p1_edge_form(mesh, u, v) - want) <= 1e-13 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("degenerate triangles are reported with their index") {
  TriMesh2D mesh = structured_mesh(2);
  mesh.vertices.push_back({0.25, 0.25});
  mesh.boundary.push_back(1);
  mesh.triangles.push_back({0, 4, 9});  // (0,0), (0.5,0.5), (0.25,0.25) are collinear
  try {
    p1_assemble(mesh);
    FAIL("expected AssemblyError");
  } catch (const AssemblyError& e) {
    CHECK(e.triangle() == 8);
  }
}

TEST_CASE("mesh text format round trip and validation") {
  TriMesh2D mesh = structured_mesh(3, -1.0, 1.0);
  std::swap(mesh.triangles[2][1], mesh.triangles[2][2]);  // clockwise on disk
  std::stringstream io;
  write_mesh(io, mesh);
  const TriMesh2D back = read_mesh(io);
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  CHECK(back.vertices == mesh.vertices);
  CHECK(back.boundary == mesh.boundary);
  CHECK(signed_area(back, 2) > 0.0);
  back.validate();

  std::stringstream bad("3 1\n0 0 1\n1 0 1\n0 1 1\n0 1 7\n");
  CHECK_THROWS_AS(read_mesh(bad), InvalidArgument);
  std::stringstream truncated("4 2\n0 0 1\n");
  CHECK_THROWS_AS(read_mesh(truncated), InvalidArgument);
}
