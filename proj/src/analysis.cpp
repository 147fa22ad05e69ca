#include "gpflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gpflow/errors.hpp"
#include "gpflow/kernels.hpp"
#include "gpflow/potentials.hpp"

namespace gpflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

State constant_state(const DiscretizationPtr& disc) { return retract(disc, std::vector<double>(disc->size(), 1.0)); }

double log2_ratio(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return kNaN;
  return std::log2(coarse / fine);
}

}  // namespace

ExactCase exact_case(int dim, double beta, const TensorDiscretization& disc) {
  if (disc.spec().half_width != 1.0) throw InvalidArgument("the exact case is defined on [-1, 1]^d only");
  if (disc.dim() != dim) throw DimensionMismatch(dim, disc.dim());
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  ExactCase ec;
  ec.beta = beta;
  ec.dim = dim;
  ec.ustar = sample(disc, exact_ground_state);
  ec.potential.resize(ec.ustar.size());
  for (std::size_t i = 0; i < ec.ustar.size(); ++i) ec.potential[i] = beta * (1.0 - ec.ustar[i] * ec.ustar[i]);
  ec.rho_bar = std::pow(0.75, dim);
  ec.lambda_star = dim * std::numbers::pi * std::numbers::pi / 4.0 + beta;
  ec.energy_star = 0.5 * ec.lambda_star - 0.25 * beta * ec.rho_bar;
  return ec;
}

ConvergenceRow solve_exact_case(const GridSpec& spec, double beta, const StudyOptions& options) {
  auto disc = make_tensor(spec);
  const ExactCase ec = exact_case(spec.dim, beta, *disc);
  Problem problem{ec.potential, beta, options.alpha};
  FlowConfig flow;
  flow.kind = FlowKind::MODIFIED_H1;
  flow.alpha = options.alpha;
  flow.step = FixedStep{options.tau};
  const RunReport rep = run(flow, problem, constant_state(disc), options.stop);

  ConvergenceRow row;
  row.scheme = spec.scheme;
  row.cells = spec.cells;
  row.unknowns_per_dim = spec.interior_per_dim();
  row.h = spec.cell_width();
  const IterationRecord& best = rep.best();
  row.lambda = best.lambda;
  row.energy = best.energy;
  row.eig_error = std::abs(best.lambda - ec.lambda_star);
  row.energy_error = std::abs(best.energy - ec.energy_star);
  const auto& u = rep.final_state->u();
  double sign = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sign += disc->weights()[i] * u[i];
  sign = sign < 0.0 ? -1.0 : 1.0;
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(sign * u[i] - ec.ustar[i]));
  row.state_error = err;
  row.eig_order = row.energy_order = row.state_order = kNaN;
  row.iterations = rep.best_iteration;
  row.reason = rep.reason;
  row.converged = rep.succeeded();
  row.wall_seconds = rep.wall_seconds;
  return row;
}

void fill_orders(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].eig_order = rows[i].energy_order = rows[i].state_order = kNaN;
    if (i == 0 || !(rows[i - 1].scheme == rows[i].scheme)) continue;
    const double levels = std::log2(rows[i - 1].h / rows[i].h);
    rows[i].eig_order = log2_ratio(rows[i - 1].eig_error, rows[i].eig_error) / levels;
    rows[i].energy_order = log2_ratio(rows[i - 1].energy_error, rows[i].energy_error) / levels;
    rows[i].state_order = log2_ratio(rows[i - 1].state_error, rows[i].state_error) / levels;
  }
}

std::vector<ConvergenceRow> convergence_study(const std::vector<Scheme>& schemes, const std::vector<int>& cells, int dim,
                                              double beta, const StudyOptions& options) {
  if (cells.size() < 2) throw InvalidArgument("a convergence study needs at least two levels");
  std::vector<ConvergenceRow> rows;
  for (const Scheme& s : schemes) {
    for (int c : cells) {
      GridSpec spec{1.0, dim, c, s};
      rows.push_back(solve_exact_case(spec, beta, options));
    }
  }
  fill_orders(rows);
  return rows;
}

SparseMatrix sparse_laplacian(const Discretization& disc) {
  if (const auto* m = dynamic_cast<const MeshDiscretization*>(&disc)) {
    SparseMatrix l = m->assembled().stiffness;
    for (int i = 0; i < l.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(l, i); it; ++it) it.valueRef() /= m->assembled().weights[i];
    }
    return l;
  }
  const auto* t = dynamic_cast<const TensorDiscretization*>(&disc);
  if (!t) throw InvalidArgument("sparse_laplacian: unsupported discretization");
  const Eigen::MatrixXd l1 = t->op().axis_operator(0).laplacian();
  const int n = t->op().n();
  const int d = t->dim();
  const std::size_t size = t->size();
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t strides[3] = {1, 1, 1};
  for (int a = d - 2; a >= 0; --a) strides[a] = strides[a + 1] * n;
  for (std::size_t i = 0; i < size; ++i) {
    for (int a = 0; a < d; ++a) {
      const int ia = static_cast<int>((i / strides[a]) % n);
      for (int j = 0; j < n; ++j) {
        const double v = l1(ia, j);
        if (v == 0.0) continue;
        trip.emplace_back(i, i + (static_cast<std::ptrdiff_t>(j) - ia) * static_cast<std::ptrdiff_t>(strides[a]), v);
      }
    }
  }
  SparseMatrix out(size, size);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseMatrix assemble_Au(const Discretization& disc, const Problem& problem, std::span<const double> u) {
  require_length(disc.size(), u.size());
  require_length(disc.size(), problem.potential.size());
  SparseMatrix a = sparse_laplacian(disc);
  for (std::size_t i = 0; i < disc.size(); ++i) a.coeffRef(i, i) += problem.potential[i] + problem.beta * u[i] * u[i];
  a.makeCompressed();
  return a;
}

MMatrixReport m_matrix_check(const SparseMatrix& a) {
  MMatrixReport r;
  if (a.rows() != a.cols()) {
    r.witness = "matrix is not square";
    return r;
  }
  bool any_positive = false;
  for (int i = 0; i < a.outerSize(); ++i) {
    double diag = 0.0, sum = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      sum += it.value();
      if (it.col() == i) {
        diag = it.value();
      } else if (it.value() > 0.0) {
        r.witness = "positive off-diagonal at (" + std::to_string(i) + ", " + std::to_string(it.col()) + ")";
        return r;
      }
    }
    if (!(diag > 0.0)) {
      r.witness = "non-positive diagonal at row " + std::to_string(i);
      return r;
    }
    // Row sums are accumulated from entries of size ~1/h^2, so allow round-off.
    if (sum < -1e-12 * diag) {
      r.witness = "negative row sum at row " + std::to_string(i);
      return r;
    }
    if (sum > 1e-12 * diag) any_positive = true;
  }
  if (!any_positive) {
    r.witness = "no row has a positive sum";
    return r;
  }
  r.passes_sufficient = true;
  return r;
}

bool monotonicity_oracle(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("monotonicity oracle needs a square matrix");
  if (a.rows() > 200) throw InvalidArgument("monotonicity oracle is limited to n <= 200");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw ContractViolation("matrix is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  const double scale = inv.cwiseAbs().maxCoeff();
  return inv.minCoeff() >= -1e-12 * scale;
}

PerronReport perron_check(const LinearMap& apply_A, std::span<const double> weights, const EigenOptions& options,
                          double tol) {
  PerronReport r;
  r.eig = lowest_two_eigenpairs(apply_A, weights, tol, options);
  r.gap = r.eig.gap;
  r.min_entry = *std::min_element(r.eig.v0.begin(), r.eig.v0.end());
  r.ok = r.gap > 0.0 && r.min_entry > 0.0;
  return r;
}

EigenResult linearized_eigenpairs(const Discretization& disc, const Problem& problem, std::span<const double> u,
                                  double tol) {
  require_length(disc.size(), u.size());
  const std::vector<double> uu(u.begin(), u.end());
  const auto w = disc.weights();
  double s = 0.0, t = 0.0;
  for (std::size_t i = 0; i < uu.size(); ++i) {
    s += w[i] * (problem.potential[i] + problem.beta * uu[i] * uu[i]);
    t += w[i];
  }
  const double sigma = s / t;
  EigenOptions opt;
  opt.preconditioner = [&disc, sigma](std::span<const double> x, std::span<double> y) { disc.solve_shifted(sigma, x, y); };
  opt.initial = uu;
  const LinearMap a = [&](std::span<const double> x, std::span<double> y) { apply_Au(disc, problem, uu, x, y); };
  return lowest_two_eigenpairs(a, w, tol, opt);
}

std::vector<EigengapRow> eigengap_study(const std::vector<GridSpec>& specs, const std::string& potential, double beta,
                                        const FlowConfig& flow, const StopRule& stop) {
  const PotentialSpec pot = PotentialSpec::parse(potential);
  std::vector<EigengapRow> rows;
  for (const GridSpec& spec : specs) {
    auto disc = make_tensor(spec);
    Problem problem{pot.evaluate(*disc, beta), beta, flow.alpha};
    const RunReport rep = run(flow, problem, constant_state(disc), stop);
    if (!rep.succeeded()) throw ConvergenceError("ground state did not converge on " + disc->describe());
    const EigenResult e = linearized_eigenpairs(*disc, problem, rep.final_state->u());
    rows.push_back({spec.cell_width(), e.lambda0, e.lambda1, e.gap, rep.best_iteration});
  }
  return rows;
}

EigengapSummary summarize(const std::vector<EigengapRow>& rows) {
  EigengapSummary s;
  if (rows.empty()) return s;
  s.min_gap = s.max_gap = rows.front().gap;
  s.all_positive = true;
  s.bounded_below = true;
  for (const auto& r : rows) {
    s.min_gap = std::min(s.min_gap, r.gap);
    s.max_gap = std::max(s.max_gap, r.gap);
    s.all_positive = s.all_positive && r.gap > 0.0;
    s.bounded_below = s.bounded_below && r.gap >= 0.5 * rows.front().gap;
  }
  s.spread = s.max_gap > 0.0 ? (s.max_gap - s.min_gap) / s.max_gap : kNaN;
  return s;
}

ConvexityReport convexity_check(const Discretization& disc, const Problem& problem, int samples, std::uint64_t seed) {
  ConvexityReport rep;
  rep.samples = samples;
  if (!disc.monotone()) return rep;
  rep.supported = true;
  const std::size_t n = disc.size();
  if (n > 400) throw InvalidArgument("convexity check Hessians are limited to 400 unknowns");
  problem.validate(n);
  const auto w = disc.weights();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.1, 1.0), sym(-1.0, 1.0);

  // Gradient of F(v) = E_h(sqrt v): dF/dv_i = w_i (A_u u)_i / (2 u_i).
  auto gradient = [&](const std::vector<double>& v, std::vector<double>& g) {
    std::vector<double> u(n), au(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::sqrt(v[i]);
    apply_Au(disc, problem, u, u, au);
    for (std::size_t i = 0; i < n; ++i) g[i] = w[i] * au[i] / (2.0 * u[i]);
  };

  rep.worst_hessian_ratio = std::numeric_limits<double>::infinity();
  rep.worst_abs_gap = std::numeric_limits<double>::infinity();
  const double eps = 1e-5;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> v(n);
    for (auto& x : v) x = uni(rng);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += w[i] * v[i];
    for (auto& x : v) x /= mass;

    Eigen::MatrixXd hess(n, n);
    std::vector<double> gp(n), gm(n);
    for (std::size_t j = 0; j < n; ++j) {
      // Relative step keeps v + eps e_j positive.
      const double step = eps * v[j];
      std::vector<double> vp = v, vm = v;
      vp[j] += step;
      vm[j] -= step;
      gradient(vp, gp);
      gradient(vm, gm);
      for (std::size_t i = 0; i < n; ++i) hess(i, j) = (gp[i] - gm[i]) / (2.0 * step);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    const double scale = hess.cwiseAbs().maxCoeff();
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess, Eigen::EigenvaluesOnly).eigenvalues()[0];
    rep.worst_hessian_ratio = std::min(rep.worst_hessian_ratio, lmin / scale);

    std::vector<double> u(n), lap(n);
    for (auto& x : u) x = sym(rng);
    disc.apply_laplacian(u, lap);
    const double e_signed = energy(disc, problem, u, lap);
    for (auto& x : u) x = std::abs(x);
    disc.apply_laplacian(u, lap);
    rep.worst_abs_gap = std::min(rep.worst_abs_gap, e_signed - energy(disc, problem, u, lap));
  }
  rep.hessian_psd = rep.worst_hessian_ratio >= -1e-8;
  rep.abs_inequality = rep.worst_abs_gap >= -1e-12;
  return rep;
}

RateFit rate_fit(std::span<const double> residuals, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidArgument("tail_fraction must be in (0, 1]");
  const std::size_t total = residuals.size();
  const std::size_t start = total - static_cast<std::size_t>(std::ceil(tail_fraction * total));
  std::vector<double> xs, ys;
  for (std::size_t i = start; i < total; ++i) {
    if (residuals[i] > 0.0) {
      xs.push_back(static_cast<double>(i));
      ys.push_back(std::log(residuals[i]));
    }
  }
  if (xs.size() < 10) throw InvalidArgument("rate_fit needs at least 10 positive tail points, got " + std::to_string(xs.size()));
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  const double slope = sxy / sxx;
  fit.rate = std::exp(slope);
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

RateFit rate_fit(const RunReport& report, double tail_fraction) {
  if (report.records.empty()) throw InvalidArgument("rate_fit needs a non-empty run");
  // Residuals within 100x of the best one are round-off noise, not convergence.
  const double floor = 100.0 * report.best().residual;
  std::vector<double> r;
  for (const auto& rec : report.records) {
    if (rec.index > report.best_iteration || rec.residual <= floor) break;
    r.push_back(rec.residual);
  }
  return rate_fit(r, tail_fraction);
}

}  // namespace gpflow
