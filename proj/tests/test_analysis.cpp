#include <doctest.h>

#include <numbers>
#include <random>

#include "gpflow/analysis.hpp"
#include "gpflow/errors.hpp"
#include "gpflow/potentials.hpp"
#include "gpflow/trimesh.hpp"
#include "oracles.hpp"

using namespace gpflow;

TEST_CASE("exact case") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int d = 1; d <= 3; ++d) {
    const auto disc = make_tensor({1.0, d, 8, Scheme::fd2()});
    const ExactCase ec = exact_case(d, 1.0, *disc);
    CHECK(ec.lambda_star == doctest::Approx(d * pi2 / 4.0 + 1.0).epsilon(1e-15));
    CHECK(ec.rho_bar == doctest::Approx(std::pow(0.75, d)).epsilon(1e-15));
    CHECK(ec.energy_star == doctest::Approx(ec.lambda_star / 2.0 - 0.25 * std::pow(0.75, d)).epsilon(1e-15));
    CHECK(inner_h(*disc, ec.ustar, ec.ustar) == doctest::Approx(1.0).epsilon(1e-13));
    std::vector<double> sq(ec.ustar.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = ec.ustar[i] * ec.ustar[i];
    CHECK(inner_h(*disc, sq, sq) == doctest::Approx(std::pow(0.75, d)).epsilon(1e-13));
    for (std::size_t i = 0; i < sq.size(); ++i) CHECK(ec.potential[i] == doctest::Approx(1.0 - sq[i]).epsilon(1e-14));
  }
  const auto three = make_tensor({1.0, 3, 4, Scheme::fd2()});
  CHECK(exact_case(3, 1.0, *three).lambda_star == doctest::Approx(8.40220).epsilon(1e-6));
  CHECK_THROWS_AS(exact_case(2, 1.0, *make_tensor({2.0, 2, 4, Scheme::fd2()})), InvalidArgument);
  CHECK_THROWS_AS(exact_case(2, 1.0, *three), DimensionMismatch);
}

TEST_CASE("convergence study") {
  SUBCASE("FD2 errors follow the closed form and order 2") {
    const auto rows = convergence_study({Scheme::fd2()}, {8, 16, 32}, 2, 1.0);
    REQUIRE(rows.size() == 3);
    const double pi2_4 = std::numbers::pi * std::numbers::pi / 4.0;
    for (const auto& r : rows) {
      CHECK(r.converged);
      const double mu1 = oracle::fd2_mu(1, r.h);
      CHECK(r.eig_error == doctest::Approx(2.0 * (pi2_4 - mu1)).epsilon(1e-8));
      CHECK(r.energy_error == doctest::Approx(pi2_4 - mu1).epsilon(1e-8));
      CHECK(r.state_error <= 1e-10);
    }
    CHECK(std::isnan(rows[0].eig_order));
    CHECK(rows[2].eig_order == doctest::Approx(2.0).epsilon(5e-3));
  }

  SUBCASE("fourth-order schemes") {
    const auto rows = convergence_study({Scheme::compact4(), Scheme::sem(2)}, {4, 8, 16}, 1, 2.0);
    REQUIRE(rows.size() == 6);
    for (const auto& r : rows) CHECK(r.converged);
    CHECK(rows[2].eig_order == doctest::Approx(4.0).epsilon(0.03));
    CHECK(rows[5].eig_order == doctest::Approx(4.0).epsilon(0.03));
  }

  SUBCASE("orders from log2 ratios") {
    std::vector<ConvergenceRow> rows(3);
    rows[0].eig_error = 1.0, rows[1].eig_error = 0.25, rows[2].eig_error = 0.0625;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].h = 0.5 / (1 << i);
      rows[i].energy_error = rows[i].state_error = rows[i].eig_error;
    }
    fill_orders(rows);
    CHECK(rows[1].eig_order == doctest::Approx(2.0));
    CHECK(rows[2].state_order == doctest::Approx(2.0));
  }

  CHECK_THROWS_AS(convergence_study({Scheme::fd2()}, {8}, 1, 1.0), InvalidArgument);
}

TEST_CASE("M-matrix check and monotonicity oracle") {
  const auto fd = make_tensor({1.0, 2, 6, Scheme::fd2()});
  const auto l = sparse_laplacian(*fd);
  CHECK(m_matrix_check(l).passes_sufficient);
  CHECK(monotonicity_oracle(Eigen::MatrixXd(l)));

  const auto sem = make_tensor({1.0, 1, 3, Scheme::sem(2)});
  const auto r = m_matrix_check(sparse_laplacian(*sem));
  CHECK_FALSE(r.passes_sufficient);
  CHECK(r.witness.find("off-diagonal") != std::string::npos);

  SparseMatrix id(4, 4);
  id.setIdentity();
  CHECK(m_matrix_check(id).passes_sufficient);

  // Sufficient test fails but the inverse is still positive.
  Eigen::MatrixXd a(2, 2);
  a << 2.0, 0.5, 0.5, 2.0;
  Eigen::MatrixXd b(2, 2);
  b << 1.0, -1.0, -1.0, 2.0;
  CHECK_FALSE(monotonicity_oracle(a));
  CHECK(monotonicity_oracle(b));
  CHECK_THROWS_AS(monotonicity_oracle(Eigen::MatrixXd::Zero(3, 3)), ContractViolation);
  CHECK_THROWS_AS(monotonicity_oracle(Eigen::MatrixXd::Identity(201, 201)), InvalidArgument);

  // A_u on FD2 and a P1 mesh: the sufficient test implies a positive inverse.
  std::mt19937_64 rng(4);
  const auto mesh = make_mesh(structured_mesh(8, -1.0, 1.0));
  for (const DiscretizationPtr& d : {DiscretizationPtr(fd), DiscretizationPtr(mesh)}) {
    for (int t = 0; t < 5; ++t) {
      const Problem p{oracle::random_vector(d->size(), rng, 0.0, 5.0), 3.0, 0.0};
      const auto u = oracle::random_vector(d->size(), rng);
      const auto au = assemble_Au(*d, p, u);
      REQUIRE(m_matrix_check(au).passes_sufficient);
      CHECK(monotonicity_oracle(Eigen::MatrixXd(au)));
    }
  }
}

TEST_CASE("Perron check and linearized eigenpairs") {
  const auto disc = make_tensor({1.0, 2, 12, Scheme::fd2()});
  const ExactCase ec = exact_case(2, 2.0, *disc);
  const Problem p{ec.potential, 2.0, 0.0};
  const double h = 1.0 / 6.0;
  const double mu1 = oracle::fd2_mu(1, h), mu2 = oracle::fd2_mu(2, h);

  // V = beta (1 - u*^2), so A_{u*} = -Delta_h + beta and its lowest eigenvalue is 2 mu1 + beta.
  const EigenResult e = linearized_eigenpairs(*disc, p, ec.ustar);
  CHECK(e.lambda0 == doctest::Approx(2.0 * mu1 + 2.0).epsilon(1e-8));
  CHECK(e.gap > 0.0);

  const LinearMap a = [&](std::span<const double> x, std::span<double> y) {
    disc->apply_laplacian(x, y);
  };
  const PerronReport pr = perron_check(a, disc->weights());
  CHECK(pr.ok);
  CHECK(pr.gap == doctest::Approx(mu2 - mu1).epsilon(1e-7));
  CHECK(pr.min_entry > 0.0);
}

TEST_CASE("eigengap study on the exact case") {
  std::vector<GridSpec> specs;
  for (int cells : {20, 40, 80}) specs.push_back({1.0, 1, cells, Scheme::fd2()});
  FlowConfig flow;
  flow.alpha = 0.2;

  const auto rows = eigengap_study(specs, "exact_case", 1.0, flow);
  REQUIRE(rows.size() == 3);
  const EigengapSummary s = summarize(rows);
  CHECK(s.all_positive);
  CHECK(s.bounded_below);
  CHECK(s.spread <= 0.05);

  const auto linear = eigengap_study(specs, "exact_case", 0.0, flow);
  for (const auto& r : linear) CHECK(r.gap == doctest::Approx(oracle::fd2_mu(2, r.h) - oracle::fd2_mu(1, r.h)).epsilon(1e-7));
  CHECK(summarize({}).all_positive == false);
}

TEST_CASE("convexity check") {
  const auto fd = make_tensor({1.0, 1, 8, Scheme::fd2()});
  std::mt19937_64 rng(2);
  const Problem p{oracle::random_vector(fd->size(), rng, 0.0, 3.0), 2.0, 0.0};
  const ConvexityReport r = convexity_check(*fd, p, 20);
  CHECK(r.supported);
  CHECK(r.hessian_psd);
  CHECK(r.abs_inequality);
  CHECK(r.worst_abs_gap >= -1e-12);
  CHECK(r.samples == 20);

  const auto mesh = make_mesh(structured_mesh(6, -1.0, 1.0));
  const Problem pm{std::vector<double>(mesh->size(), 1.0), 5.0, 0.0};
  const ConvexityReport rm = convexity_check(*mesh, pm, 10);
  CHECK(rm.supported);
  CHECK(rm.hessian_psd);
  CHECK(rm.abs_inequality);

  const auto sem = make_tensor({1.0, 1, 4, Scheme::sem(2)});
  CHECK_FALSE(convexity_check(*sem, Problem{std::vector<double>(sem->size(), 0.0), 1.0, 0.0}, 5).supported);
}

TEST_CASE("rate fit") {
  std::vector<double> geometric(40);
  for (int n = 0; n < 40; ++n) geometric[n] = std::pow(0.5, n);
  const RateFit g = rate_fit(geometric, 0.5);
  CHECK(g.rate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.points == 20);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> noise(40);
  for (auto& x : noise) x = uni(rng);
  CHECK(rate_fit(noise, 1.0).r2 < 0.5);
  CHECK_THROWS_AS(rate_fit(std::vector<double>(5, 1.0), 1.0), InvalidArgument);
  CHECK_THROWS_AS(rate_fit(geometric, 0.0), InvalidArgument);

  const auto disc = make_tensor({1.0, 2, 20, Scheme::fd2()});
  const ExactCase ec = exact_case(2, 1.0, *disc);
  FlowConfig f;
  f.alpha = 0.2;
  const RunReport rep =
      run(f, Problem{ec.potential, 1.0, 0.2}, retract(disc, std::vector<double>(disc->size(), 1.0)), StopRule{0.0, 10, 200});
  const RateFit rf = rate_fit(rep, 1.0);
  CHECK(rf.rate < 1.0);
  CHECK(rf.r2 > 0.99);
}
