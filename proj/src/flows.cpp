#include "gpflow/flows.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>

#include "gpflow/errors.hpp"
#include "gpflow/kernels.hpp"
#include "gpflow/pcg.hpp"

namespace gpflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInnerTol = 1e-12;
constexpr int kInnerMaxIter = 1000;

struct Direction {
  std::vector<double> g;
  double grad_norm_x2 = kNaN;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// h-weighted mean of a coefficient field; used as the constant shift of the
// Laplacian preconditioner.
double weighted_mean(const Discretization& disc, std::span<const double> b) {
  const auto w = disc.weights();
  double s = 0.0, t = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    s += w[i] * b[i];
    t += w[i];
  }
  return s / t;
}

std::vector<double> potential_plus_density(const State& state, const Problem& problem) {
  std::vector<double> b(state.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = problem.potential[i] + problem.beta * state.u()[i] * state.u()[i];
  return b;
}

void inner_solve(const LinearMap& a, const LinearMap& p, const Discretization& disc, std::span<const double> rhs,
                 std::span<double> x) {
  std::fill(x.begin(), x.end(), 0.0);
  const PcgResult r = pcg(a, p, disc.weights(), rhs, x, kInnerTol, kInnerMaxIter);
  if (!r.converged) {
    throw ConvergenceError("inner pcg did not converge (relative residual " + std::to_string(r.relative_residual) + ")");
  }
}

Direction h1_direction(const State& state, double alpha, std::span<const double> au) {
  const Discretization& disc = state.disc();
  const std::size_t n = state.size();
  Direction d;
  d.g.resize(n);
  std::vector<double> gu(n);
  disc.solve_shifted(alpha, au, d.g);
  disc.solve_shifted(alpha, state.u(), gu);
  const double gamma = inner_h(disc, state.u(), d.g) / inner_h(disc, state.u(), gu);
  kernels::active().axpby(-gamma, gu.data(), 1.0, d.g.data(), n);
  // (-Delta_h + alpha) g = A_u u - gamma u and <g, u>_h = 0.
  d.grad_norm_x2 = inner_h(disc, d.g, au);
  return d;
}

Direction metric_direction(Metric metric, const State& state, const Problem& problem, double tau) {
  const Discretization& disc = state.disc();
  const std::size_t n = state.size();
  const auto& u = state.u();
  const auto& k = kernels::active();
  Direction d;
  d.g.resize(n);
  std::vector<double> gu(n);

  switch (metric) {
    case Metric::L2: {
      // Implicit L2 metric G = (I + tau A_u)^{-1}; the step u - tau g equals G u / <u, G u>_h.
      const double sigma = weighted_mean(disc, potential_plus_density(state, problem));
      const LinearMap a = [&](std::span<const double> x, std::span<double> y) {
        apply_Au(disc, problem, u, x, y);
        k.axpby(1.0, x.data(), tau, y.data(), x.size());
      };
      const LinearMap p = [&](std::span<const double> x, std::span<double> y) {
        disc.solve_shifted(sigma + 1.0 / tau, x, y);
        for (double& v : y) v /= tau;
      };
      inner_solve(a, p, disc, u, gu);
      const double c = 1.0 / inner_h(disc, u, gu);
      for (std::size_t i = 0; i < n; ++i) d.g[i] = (u[i] - c * gu[i]) / tau;
      break;
    }
    case Metric::A0: {
      const double sigma = weighted_mean(disc, problem.potential);
      const LinearMap a = [&](std::span<const double> x, std::span<double> y) {
        disc.apply_laplacian(x, y);
        k.add_potential(problem.potential.data(), 0.0, x.data(), x.data(), y.data(), x.size());
      };
      const LinearMap p = [&](std::span<const double> x, std::span<double> y) { disc.solve_shifted(sigma, x, y); };
      // G A_u u = u + beta G(u^3) with G = (-Delta_h + V)^{-1}.
      std::vector<double> u3(n), gu3(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) u3[i] = u[i] * u[i] * u[i];
      if (problem.beta != 0.0) inner_solve(a, p, disc, u3, gu3);
      inner_solve(a, p, disc, u, gu);
      for (std::size_t i = 0; i < n; ++i) d.g[i] = u[i] + problem.beta * gu3[i];
      const double gamma = inner_h(disc, u, d.g) / inner_h(disc, u, gu);
      k.axpby(-gamma, gu.data(), 1.0, d.g.data(), n);
      break;
    }
    case Metric::AU: {
      const double sigma = weighted_mean(disc, potential_plus_density(state, problem));
      const LinearMap a = [&](std::span<const double> x, std::span<double> y) { apply_Au(disc, problem, u, x, y); };
      const LinearMap p = [&](std::span<const double> x, std::span<double> y) { disc.solve_shifted(sigma, x, y); };
      // G A_u u = u with G = A_u^{-1}.
      inner_solve(a, p, disc, u, gu);
      const double gamma = state.norm2() / inner_h(disc, u, gu);
      for (std::size_t i = 0; i < n; ++i) d.g[i] = u[i] - gamma * gu[i];
      break;
    }
  }
  return d;
}

Direction direction_for(FlowKind kind, const State& state, const Problem& problem, double tau,
                        std::span<const double> au) {
  switch (kind) {
    case FlowKind::MODIFIED_H1:
    case FlowKind::H1_SEMINORM:
      return h1_direction(state, problem.alpha, au);
    case FlowKind::L2:
      return metric_direction(Metric::L2, state, problem, tau);
    case FlowKind::A0:
      return metric_direction(Metric::A0, state, problem, tau);
    case FlowKind::AU:
      return metric_direction(Metric::AU, state, problem, tau);
    case FlowKind::BFSP:
      break;
  }
  throw InvalidArgument("BFSP has no descent direction");
}

State step_along(const State& state, std::span<const double> g, double tau) {
  std::vector<double> v = state.u();
  kernels::active().axpby(-tau, g.data(), 1.0, v.data(), v.size());
  return retract(state.disc_ptr(), std::move(v));
}

}  // namespace

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::MODIFIED_H1:
      return "modified_h1";
    case FlowKind::H1_SEMINORM:
      return "h1_seminorm";
    case FlowKind::L2:
      return "l2";
    case FlowKind::A0:
      return "a0";
    case FlowKind::AU:
      return "au";
    case FlowKind::BFSP:
      return "bfsp";
  }
  return "?";
}

FlowKind parse_flow_kind(const std::string& text) {
  const std::string t = lower(text);
  if (t == "modified_h1" || t == "h1" || t == "modified-h1") return FlowKind::MODIFIED_H1;
  if (t == "h1_seminorm" || t == "h1-seminorm") return FlowKind::H1_SEMINORM;
  if (t == "l2") return FlowKind::L2;
  if (t == "a0") return FlowKind::A0;
  if (t == "au" || t == "a_u") return FlowKind::AU;
  if (t == "bfsp") return FlowKind::BFSP;
  throw InvalidArgument("unknown flow kind '" + text + "'");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::Stalled:
      return "stalled";
    case Termination::MaxIter:
      return "max_iter";
    case Termination::StepFailure:
      return "step_failure";
  }
  return "?";
}

void FlowConfig::validate() const {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  if (const auto* f = std::get_if<FixedStep>(&step)) {
    if (!(f->tau > 0.0)) throw InvalidArgument("step size tau must be positive");
  } else {
    const auto& ls = std::get<LineSearch>(step);
    if (!(ls.lo > 0.0 && ls.lo < ls.hi)) throw InvalidArgument("line search bracket needs 0 < lo < hi");
    if (!(ls.tol > 0.0)) throw InvalidArgument("line search tolerance must be positive");
    if (ls.max_evals < 1) throw InvalidArgument("line search needs max_evals >= 1");
  }
  if (kind == FlowKind::BFSP && !(dt > 0.0)) throw InvalidArgument("BFSP time step must be positive");
  if (bfsp_shift && !(*bfsp_shift >= 0.0)) throw InvalidArgument("BFSP shift must be nonnegative");
}

void StopRule::validate() const {
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (stall_window < 2) throw InvalidArgument("stall_window must be >= 2");
  if (!(residual_tol >= 0.0)) throw InvalidArgument("residual_tol must be nonnegative");
}

int RunReport::first_below(double tol) const {
  for (const auto& r : records) {
    if (r.residual <= tol) return r.index;
  }
  return -1;
}

State step_modified_h1(const State& state, const Problem& problem, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("step size must be positive");
  const std::vector<double> g = riemannian_gradient(state, problem);
  return step_along(state, g, tau);
}

double bfsp_optimal_shift(const State& state, const Problem& problem) {
  const std::vector<double> b = potential_plus_density(state, problem);
  const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
  return 0.5 * (*lo + *hi);
}

State step_bfsp(const State& state, const Problem& problem, double dt, double shift) {
  if (!(dt > 0.0)) throw InvalidArgument("BFSP time step must be positive");
  const std::size_t n = state.size();
  const double c = shift + 1.0 / dt;
  std::vector<double> rhs(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = state.u()[i];
    rhs[i] = (c - problem.potential[i] - problem.beta * u * u) * u;
  }
  state.disc().solve_shifted(c, rhs, next);
  return retract(state.disc_ptr(), std::move(next));
}

std::vector<double> descent_direction(FlowKind kind, const State& state, const Problem& problem, double tau) {
  const std::vector<double> au = apply_Au(state, problem, state.u());
  Problem p = problem;
  if (kind == FlowKind::H1_SEMINORM) p.alpha = 0.0;
  return direction_for(kind, state, p, tau, au).g;
}

State step_metric(const State& state, const Problem& problem, double tau, Metric metric) {
  if (!(tau > 0.0)) throw InvalidArgument("step size must be positive");
  const Direction d = metric_direction(metric, state, problem, tau);
  return step_along(state, d.g, tau);
}

double bounded_minimize(const std::function<double(double)>& f, double lo, double hi, double tol, int max_evals) {
  if (!(lo < hi)) throw InvalidArgument("bounded_minimize needs lo < hi");
  // Brent's bracket precision is about 2^(1 - bits) relative to the abscissa.
  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(tol))) + 1, 4, 52);
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_evals);
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, bits, iters);
  return r.first;
}

double line_search_step(const State& state, const Problem& problem, std::span<const double> g, double lo, double hi,
                        double tol, int max_evals) {
  if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) return lo;
  const auto phi = [&](double tau) {
    const State s = step_along(state, g, tau);
    const double e = energy(s, problem);
    if (!std::isfinite(e)) throw ConvergenceError("non-finite energy at step " + std::to_string(tau));
    return e;
  };
  return bounded_minimize(phi, lo, hi, tol, max_evals);
}

RunReport run(const FlowConfig& flow, const Problem& problem, const State& u0, const StopRule& stop) {
  flow.validate();
  stop.validate();
  Problem p = problem;
  p.alpha = flow.kind == FlowKind::H1_SEMINORM ? 0.0 : flow.alpha;
  p.validate(u0.size());

  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  State state = retract(u0.disc_ptr(), u0.u());
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_u = state.u();

  for (int n = 0;; ++n) {
    const Evaluation ev = evaluate(state, p, flow.residual_norm);
    IterationRecord rec;
    rec.index = n;
    rec.energy = ev.energy;
    rec.residual = ev.residual;
    rec.lambda = ev.lambda;
    rec.grad_norm_x2 = kNaN;
    if (!std::isfinite(ev.energy) || !std::isfinite(ev.residual)) {
      report.records.push_back(rec);
      report.reason = Termination::StepFailure;
      report.message = "non-finite energy or residual at iteration " + std::to_string(n);
      break;
    }
    if (ev.residual < best * (1.0 - 1e-14)) {
      best = ev.residual;
      best_u = state.u();
      report.best_iteration = n;
    }
    if (ev.residual <= stop.residual_tol) {
      report.records.push_back(rec);
      report.reason = Termination::Converged;
      break;
    }
    if (n - report.best_iteration >= stop.stall_window) {
      report.records.push_back(rec);
      report.reason = Termination::Stalled;
      break;
    }
    if (n >= stop.max_iter) {
      report.records.push_back(rec);
      report.reason = Termination::MaxIter;
      break;
    }

    try {
      if (flow.kind == FlowKind::BFSP) {
        const double shift = flow.bfsp_shift ? *flow.bfsp_shift : bfsp_optimal_shift(state, p);
        rec.step = flow.dt;
        report.records.push_back(rec);
        state = step_bfsp(state, p, flow.dt, shift);
        continue;
      }
      double tau = 1.0;
      if (const auto* f = std::get_if<FixedStep>(&flow.step)) tau = f->tau;
      const Direction d = direction_for(flow.kind, state, p, tau, ev.au);
      rec.grad_norm_x2 = d.grad_norm_x2;
      if (const auto* ls = std::get_if<LineSearch>(&flow.step)) {
        tau = line_search_step(state, p, d.g, ls->lo, ls->hi, ls->tol, ls->max_evals);
      }
      rec.step = tau;
      report.records.push_back(rec);
      state = step_along(state, d.g, tau);
    } catch (const Error& e) {
      if (report.records.empty() || report.records.back().index != n) report.records.push_back(rec);
      report.reason = Termination::StepFailure;
      report.message = e.what();
      break;
    }
  }

  report.final_state.emplace(u0.disc_ptr(), std::move(best_u));
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace gpflow
