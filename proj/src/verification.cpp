#include "gpflow/verification.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "gpflow/analysis.hpp"
#include "gpflow/discretization.hpp"
#include "gpflow/energy.hpp"
#include "gpflow/errors.hpp"
#include "gpflow/flows.hpp"
#include "gpflow/potentials.hpp"
#include "gpflow/quadrature.hpp"

namespace gpflow {

namespace {

using Rng = std::mt19937_64;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

PropertyResult finish(std::string name, int trials, int failures, std::string detail) {
  PropertyResult r{std::move(name), trials, failures, failures == 0 && trials > 0, std::move(detail)};
  return r;
}

std::vector<double> random_vector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> uni(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = uni(rng);
  return v;
}

State random_unit(const DiscretizationPtr& disc, Rng& rng) { return retract(disc, random_vector(disc->size(), rng)); }

Problem random_problem(const Discretization& disc, Rng& rng, double alpha) {
  std::uniform_real_distribution<double> beta(0.5, 10.0);
  return Problem{random_vector(disc.size(), rng, 0.0, 2.0), beta(rng), alpha};
}

// Unit square with boundary points on the sides and random interior points.
TriMesh2D random_mesh(int side, int interior, Rng& rng) {
  std::vector<std::array<double, 2>> pts;
  std::vector<std::uint8_t> flags;
  for (int i = 0; i < side; ++i) {
    const double t = static_cast<double>(i) / side;
    for (const auto& p : {std::array<double, 2>{t, 0.0}, std::array<double, 2>{1.0, t}, std::array<double, 2>{1.0 - t, 1.0},
                          std::array<double, 2>{0.0, 1.0 - t}}) {
      pts.push_back(p);
      flags.push_back(1);
    }
  }
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  for (int i = 0; i < interior; ++i) {
    pts.push_back({uni(rng), uni(rng)});
    flags.push_back(0);
  }
  return delaunay_mesh(pts, flags);
}

std::vector<DiscretizationPtr> state_cases(const SuiteOptions& opt, Rng& rng) {
  std::vector<DiscretizationPtr> cases{
      make_tensor({1.0, 1, 32, Scheme::fd2()}),
      make_tensor({2.0, 2, 4, Scheme::sem(3)}),
      make_tensor({1.0, 2, 12, Scheme::compact4()}),
      make_mesh(random_mesh(8, 40, rng)),
  };
  if (opt.grid) cases.push_back(make_tensor(*opt.grid));
  return cases;
}

// Dense Kronecker sum built directly from the 1D matrix (independent of the
// tensor contraction code).
Eigen::MatrixXd dense_kronecker(const Eigen::MatrixXd& l1, int d) {
  const int n = static_cast<int>(l1.rows());
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  auto kron = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return k;
  };
  if (d == 1) return l1;
  if (d == 2) return kron(l1, id) + kron(id, l1);
  return kron(kron(l1, id), id) + kron(kron(id, l1), id) + kron(kron(id, id), l1);
}

PropertyResult retraction_bound(const std::vector<DiscretizationPtr>& cases, int draws, Rng& rng) {
  const double alpha = 0.15;
  int fails = 0;
  double worst = 0.0;
  std::uniform_real_distribution<double> scale(0.01, 2.0);
  for (int t = 0; t < draws; ++t) {
    const auto& disc = cases[t % cases.size()];
    const State u = random_unit(disc, rng);
    std::vector<double> v = random_vector(disc->size(), rng);
    const double c = inner_h(*disc, u.u(), v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u.u()[i];
    const double s = scale(rng) / std::sqrt(inner_h(*disc, v, v));
    for (auto& x : v) x *= s;
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = u.u()[i] + v[i];
    const State r = retract(disc, w);
    std::vector<double> diff(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) diff[i] = r.u()[i] - w[i];
    const double lhs = norm_X(*disc, alpha, diff);
    const double rhs = 0.5 * inner_h(*disc, v, v) * norm_X(*disc, alpha, w);
    worst = std::max(worst, lhs / rhs);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-14) ++fails;
  }
  return finish("retraction bound", draws, fails, "max lhs/rhs " + fmt(worst));
}

PropertyResult norm_inequalities(const std::vector<DiscretizationPtr>& cases, int draws, Rng& rng) {
  const double alpha = 0.15;
  int fails = 0;
  double worst = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto& disc = cases[t % cases.size()];
    const std::vector<double> u = random_vector(disc->size(), rng);
    const double nh = std::sqrt(inner_h(*disc, u, u));
    const double nx = norm_X(*disc, alpha, u);
    std::vector<double> gu(u.size());
    disc->solve_shifted(alpha, u, gu);
    const double ngx = norm_X(*disc, alpha, gu);
    const double bound = nh / std::sqrt(alpha);
    const double r1 = nh / (nx / std::sqrt(alpha));
    const double r2 = ngx / bound;
    worst = std::max({worst, r1, r2});
    if (r1 > 1.0 + 1e-12 || r2 > 1.0 + 1e-12) ++fails;
  }
  return finish("norm inequalities (L2 vs X, solver bound)", draws, fails, "max ratio " + fmt(worst));
}

PropertyResult gradient_ordering(const std::vector<DiscretizationPtr>& cases, int draws, Rng& rng) {
  int fails = 0;
  double worst_ratio = 0.0, worst_tan = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto& disc = cases[t % cases.size()];
    const Problem p = random_problem(*disc, rng, 0.15);
    const State u = random_unit(disc, rng);
    const std::vector<double> g = riemannian_gradient(u, p);
    const std::vector<double> gs = sobolev_gradient(u, p);
    const double ratio = norm_X(*disc, p.alpha, g) / norm_X(*disc, p.alpha, gs);
    const double tan = std::abs(inner_h(*disc, u.u(), g)) / std::max(1.0, std::sqrt(inner_h(*disc, g, g)));
    worst_ratio = std::max(worst_ratio, ratio);
    worst_tan = std::max(worst_tan, tan);
    if (ratio > 1.0 + 1e-12 || tan > 1e-12) ++fails;
  }
  return finish("riemannian gradient ordering and tangency", draws, fails,
                "max |g^R|/|g| " + fmt(worst_ratio) + ", max |<u,g>| " + fmt(worst_tan));
}

PropertyResult energy_decay(const std::vector<DiscretizationPtr>& cases, int draws, Rng& rng) {
  const double tau = 0.5;
  FlowConfig flow;
  flow.alpha = 0.15;
  flow.step = FixedStep{tau};
  StopRule stop{1e-13, 10, 80};
  int trials = 0, ok = 0, monotone_fail = 0, runs = 0;
  while (trials < draws) {
    const auto& disc = cases[runs % cases.size()];
    ++runs;
    const Problem p = random_problem(*disc, rng, flow.alpha);
    const State u0 = retract(disc, random_vector(disc->size(), rng, 0.0, 1.0));
    const RunReport rep = run(flow, p, u0, stop);
    for (std::size_t n = 0; n + 1 < rep.records.size(); ++n) {
      const auto& a = rep.records[n];
      const auto& b = rep.records[n + 1];
      const double slack = 1e-13 * std::max(1.0, std::abs(a.energy));
      ++trials;
      if (a.energy - b.energy >= 0.5 * tau * a.grad_norm_x2 - slack) ++ok;
      if (b.energy > a.energy + slack) ++monotone_fail;
    }
  }
  const double frac = static_cast<double>(ok) / trials;
  PropertyResult r = finish("energy decay with C_d = tau/2", trials, trials - ok,
                            "satisfied fraction " + fmt(frac) + " over " + std::to_string(runs) + " runs, energy increases " +
                                std::to_string(monotone_fail));
  r.ok = frac >= 0.95 && monotone_fail == 0;
  return r;
}

PropertyResult eigenvalue_identity(const std::vector<DiscretizationPtr>& cases, int draws, Rng& rng) {
  int fails = 0;
  double worst = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto& disc = cases[t % cases.size()];
    const Problem p = random_problem(*disc, rng, 0.15);
    const State u = random_unit(disc, rng);
    const EigenvalueEstimate e = eigenvalue_estimate(u, p);
    const double err = std::abs(e.lambda - e.check) / std::max(1.0, std::abs(e.lambda));
    worst = std::max(worst, err);
    if (err > 1e-12) ++fails;
  }
  return finish("lambda = 2E + beta/2 <u^2,u^2>", draws, fails, "max relative gap " + fmt(worst));
}

PropertyResult integration_by_parts(int draws, Rng& rng) {
  int fails = 0;
  double worst = 0.0;
  for (int t = 0; t < draws; ++t) {
    double lhs = 0.0, rhs = 0.0, scale = 1.0;
    if (t % 2 == 0) {
      const TriMesh2D mesh = random_mesh(6, 20, rng);
      const AssembledOperator op = p1_assemble(mesh);
      const std::vector<double> u = random_vector(mesh.vertices.size(), rng);
      const std::vector<double> v = random_vector(mesh.vertices.size(), rng);
      lhs = p1_edge_form(mesh, u, v);
      Eigen::Map<const Eigen::VectorXd> uu(u.data(), u.size()), vv(v.data(), v.size());
      rhs = vv.dot(op.full_stiffness * uu);
      scale = std::sqrt(uu.dot(op.full_stiffness * uu) * vv.dot(op.full_stiffness * vv));
    } else {
      // SEM(k) element-by-element integral of u_h' v_h' with zero boundary values.
      const int k = 1 + (t / 2) % 6;
      const int cells = 2 + (t / 2) % 5;
      const GridSpec spec{1.5, 1, cells, Scheme::sem(k)};
      const Operator1D op = build_1d(spec);
      const QuadratureRule rule = gauss_lobatto_rule(k);
      const std::vector<double> dm = lagrange_derivative_matrix(rule.nodes);
      const int n = op.size();
      const std::vector<double> u = random_vector(n, rng), v = random_vector(n, rng);
      auto global = [&](const std::vector<double>& x, int g) { return (g == 0 || g == n + 1) ? 0.0 : x[g - 1]; };
      const double hc = spec.cell_width();
      for (int e = 0; e < cells; ++e) {
        for (int q = 0; q <= k; ++q) {
          double du = 0.0, dv = 0.0;
          for (int j = 0; j <= k; ++j) {
            du += dm[q * (k + 1) + j] * global(u, e * k + j);
            dv += dm[q * (k + 1) + j] * global(v, e * k + j);
          }
          lhs += rule.weights[q] * (hc / 2.0) * (2.0 / hc) * du * (2.0 / hc) * dv;
        }
      }
      Eigen::Map<const Eigen::VectorXd> uu(u.data(), n), vv(v.data(), n);
      rhs = vv.dot(op.stiffness * uu);
      scale = std::sqrt(uu.dot(op.stiffness * uu) * vv.dot(op.stiffness * vv));
    }
    const double err = std::abs(lhs - rhs) / scale;
    worst = std::max(worst, err);
    if (err > 1e-13) ++fails;
  }
  return finish("discrete integration by parts", draws, fails, "max relative gap " + fmt(worst));
}

PropertyResult dense_agreement(int draws, Rng& rng) {
  struct Dense {
    std::shared_ptr<const TensorDiscretization> disc;
    Eigen::MatrixXd lap;
    Eigen::PartialPivLU<Eigen::MatrixXd> shifted;
  };
  const double alpha = 0.3;
  std::vector<Dense> grids;
  for (const GridSpec& s : {GridSpec{1.0, 3, 8, Scheme::fd2()}, GridSpec{1.0, 2, 8, Scheme::sem(2)},
                            GridSpec{1.0, 3, 9, Scheme::compact4()}, GridSpec{2.0, 3, 2, Scheme::sem(4)},
                            GridSpec{1.0, 2, 20, Scheme::fd2()}}) {
    Dense d;
    d.disc = make_tensor(s);
    d.lap = dense_kronecker(d.disc->op().axis_operator(0).laplacian(), s.dim);
    d.shifted.compute(d.lap + alpha * Eigen::MatrixXd::Identity(d.lap.rows(), d.lap.cols()));
    grids.push_back(std::move(d));
  }
  int fails = 0;
  double worst_apply = 0.0, worst_solve = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Dense& g = grids[t % grids.size()];
    const std::size_t n = g.disc->size();
    const std::vector<double> x = random_vector(n, rng);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    std::vector<double> y(n), z(n);
    g.disc->apply_laplacian(x, y);
    const Eigen::VectorXd ye = g.lap * xv;
    const double ea = (Eigen::Map<Eigen::VectorXd>(y.data(), n) - ye).norm() / ye.norm();
    g.disc->solve_shifted(alpha, x, z);
    const Eigen::VectorXd ze = g.shifted.solve(xv);
    const double es = (Eigen::Map<Eigen::VectorXd>(z.data(), n) - ze).norm() / ze.norm();
    worst_apply = std::max(worst_apply, ea);
    worst_solve = std::max(worst_solve, es);
    if (ea > 1e-11 || es > 1e-11) ++fails;
  }
  return finish("kronecker apply and fast solver vs dense", draws, fails,
                "max apply error " + fmt(worst_apply) + ", max solve error " + fmt(worst_solve));
}

PropertyResult gauss_lobatto_exactness() {
  int trials = 0, fails = 0;
  double worst = 0.0;
  for (int k = 1; k <= 12; ++k) {
    const QuadratureRule r = gauss_lobatto_rule(k);
    for (int p = 0; p <= 2 * k; ++p) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) q += r.weights[i] * std::pow(r.nodes[i], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      const double err = std::abs(q - exact) / (exact == 0.0 ? 1.0 : exact);
      ++trials;
      if (p <= 2 * k - 1) {
        worst = std::max(worst, err);
        if (err > 1e-14) ++fails;
      } else if (err < 1e-10) {
        ++fails;  // the rule must not integrate x^{2k} exactly
      }
    }
  }
  return finish("Gauss-Lobatto exactness to degree 2k-1", trials, fails, "max error " + fmt(worst));
}

PropertyResult m_matrix_implies_monotone(int draws, Rng& rng) {
  int fails = 0, sufficient = 0;
  for (int t = 0; t < draws; ++t) {
    DiscretizationPtr disc;
    switch (t % 3) {
      case 0:
        disc = make_tensor({1.0, 1, 10 + t % 41, Scheme::fd2()});
        break;
      case 1:
        disc = make_tensor({1.0, 2, 9, Scheme::fd2()});
        break;
      default:
        disc = make_mesh(random_mesh(5, 25, rng));
        break;
    }
    const Problem p{random_vector(disc->size(), rng, 0.0, 2.0), std::uniform_real_distribution<double>(0.0, 10.0)(rng), 0.0};
    const std::vector<double> u = random_vector(disc->size(), rng);
    const SparseMatrix a = assemble_Au(*disc, p, u);
    if (!m_matrix_check(a).passes_sufficient) continue;
    ++sufficient;
    if (!monotonicity_oracle(Eigen::MatrixXd(a))) ++fails;
  }
  PropertyResult r = finish("m_matrix_check implies monotone inverse", draws, fails,
                            std::to_string(sufficient) + " instances passed the sufficient test");
  r.ok = fails == 0 && sufficient > 0;
  return r;
}

PropertyResult positive_ground_states(int draws, Rng& rng) {
  FlowConfig flow;
  flow.alpha = 0.2;
  StopRule stop{1e-11, 10, 400};
  int fails = 0;
  double worst = std::numeric_limits<double>::infinity();
  const auto d1 = make_tensor({1.0, 1, 24, Scheme::fd2()});
  const auto d2 = make_tensor({1.0, 2, 12, Scheme::fd2()});
  for (int t = 0; t < draws; ++t) {
    const DiscretizationPtr disc = t % 2 == 0 ? DiscretizationPtr(d1) : DiscretizationPtr(d2);
    const Problem p = random_problem(*disc, rng, flow.alpha);
    const State u0 = retract(disc, random_vector(disc->size(), rng, 0.0, 1.0));
    const RunReport rep = run(flow, p, u0, stop);
    const auto& u = rep.final_state->u();
    double mean = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) mean += disc->weights()[i] * u[i];
    const double s = mean < 0.0 ? -1.0 : 1.0;
    double mn = std::numeric_limits<double>::infinity();
    for (double x : u) mn = std::min(mn, s * x);
    worst = std::min(worst, mn);
    if (!rep.succeeded() || !(mn > 0.0)) ++fails;
  }
  return finish("converged FD2 ground states are positive", draws, fails, "min entry " + fmt(worst));
}

PropertyResult convexity(int draws, Rng& rng) {
  const auto fd = make_tensor({1.0, 1, 9, Scheme::fd2()});
  const auto mesh = make_mesh(random_mesh(5, 15, rng));
  int fails = 0;
  double worst_h = std::numeric_limits<double>::infinity(), worst_abs = std::numeric_limits<double>::infinity();
  for (int t = 0; t < draws; ++t) {
    const DiscretizationPtr disc = t % 2 == 0 ? DiscretizationPtr(fd) : DiscretizationPtr(mesh);
    const Problem p = random_problem(*disc, rng, 0.0);
    const ConvexityReport r = convexity_check(*disc, p, 1, rng());
    worst_h = std::min(worst_h, r.worst_hessian_ratio);
    worst_abs = std::min(worst_abs, r.worst_abs_gap);
    if (!r.supported || !r.hessian_psd || !r.abs_inequality) ++fails;
  }
  return finish("E(u) >= E(|u|) and convexity of E(sqrt v)", draws, fails,
                "min lambda_min/|H| " + fmt(worst_h) + ", min E(u)-E(|u|) " + fmt(worst_abs));
}

PropertyResult eigengap_stability() {
  std::vector<GridSpec> specs;
  for (int c : {40, 80, 160}) specs.push_back({1.0, 1, c, Scheme::fd2()});
  FlowConfig flow;
  flow.alpha = 0.2;
  const auto rows = eigengap_study(specs, "exact_case", 1.0, flow);
  const EigengapSummary s = summarize(rows);
  const int fails = (s.all_positive ? 0 : 1) + (s.spread <= 0.05 ? 0 : 1) + (s.bounded_below ? 0 : 1);
  std::string detail = "gaps";
  for (const auto& r : rows) detail += " " + fmt(r.gap);
  detail += ", spread " + fmt(s.spread);
  return finish("eigengap positive and stable over three FD2 levels", static_cast<int>(rows.size()), fails, detail);
}

PropertyResult linear_rate() {
  FlowConfig flow;
  flow.alpha = 0.2;
  flow.step = FixedStep{1.0};
  StopRule stop{0.0, 10, 200};
  int fails = 0, trials = 0;
  std::string detail;
  for (const GridSpec& s : {GridSpec{1.0, 1, 40, Scheme::fd2()}, GridSpec{1.0, 2, 24, Scheme::fd2()},
                            GridSpec{1.0, 3, 12, Scheme::fd2()}}) {
    auto disc = make_tensor(s);
    const ExactCase ec = exact_case(s.dim, 1.0, *disc);
    const Problem p{ec.potential, 1.0, flow.alpha};
    const RunReport rep = run(flow, p, retract(disc, std::vector<double>(disc->size(), 1.0)), stop);
    ++trials;
    try {
      const RateFit f = rate_fit(rep, 1.0);
      detail += (detail.empty() ? "" : "; ") + std::to_string(s.dim) + "D rate " + fmt(f.rate) + " r2 " + fmt(f.r2);
      if (!(f.rate < 1.0 && f.r2 > 0.99)) ++fails;
    } catch (const Error& e) {
      ++fails;
      detail += (detail.empty() ? "" : "; ") + std::string(e.what());
    }
  }
  return finish("linear convergence rate on the exact case", trials, fails, detail);
}

}  // namespace

std::vector<PropertyResult> run_property_suite(const SuiteOptions& options) {
  if (options.draws < 1) throw InvalidArgument("property suite needs at least one draw");
  Rng rng(options.seed);
  const auto cases = state_cases(options, rng);
  const int n = options.draws;
  std::vector<PropertyResult> out;
  out.push_back(retraction_bound(cases, n, rng));
  out.push_back(norm_inequalities(cases, n, rng));
  out.push_back(gradient_ordering(cases, n, rng));
  out.push_back(energy_decay(cases, n, rng));
  out.push_back(eigenvalue_identity(cases, n, rng));
  out.push_back(integration_by_parts(n, rng));
  out.push_back(dense_agreement(n, rng));
  out.push_back(gauss_lobatto_exactness());
  out.push_back(m_matrix_implies_monotone(n, rng));
  out.push_back(positive_ground_states(n, rng));
  out.push_back(convexity(n, rng));
  out.push_back(eigengap_stability());
  out.push_back(linear_rate());
  return out;
}

}  // namespace gpflow
