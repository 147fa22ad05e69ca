#include "gpflow/energy.hpp"

#include <cmath>

#include "gpflow/errors.hpp"
#include "gpflow/kernels.hpp"

namespace gpflow {

namespace {

void require_normalized(const State& s) {
  if (!s.normalized()) {
    throw ContractViolation("state is not normalized: <u,u>_h = " + std::to_string(s.norm2()));
  }
}

double euclid(std::span<const double> x) { return std::sqrt(kernels::active().dot(x.data(), x.data(), x.size())); }

}  // namespace

State::State(DiscretizationPtr disc, std::vector<double> u) : disc_(std::move(disc)), u_(std::move(u)) {
  if (!disc_) throw InvalidArgument("state needs a discretization");
  require_length(disc_->size(), u_.size());
  for (double x : u_) {
    if (!std::isfinite(x)) throw InvalidArgument("state has non-finite entries");
  }
  norm2_ = inner_h(*disc_, u_, u_);
}

bool State::normalized(double tol) const { return std::abs(norm2_ - 1.0) <= tol; }

void Problem::validate(std::size_t size) const {
  require_length(size, potential.size());
  for (double v : potential) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("potential must be finite and nonnegative");
  }
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
}

double inner_h(const Discretization& disc, std::span<const double> u, std::span<const double> v) {
  require_length(disc.size(), u.size());
  require_length(disc.size(), v.size());
  return kernels::active().wdot(disc.weights().data(), u.data(), v.data(), u.size());
}

double inner_X(const Discretization& disc, double alpha, std::span<const double> u, std::span<const double> v) {
  require_length(disc.size(), u.size());
  require_length(disc.size(), v.size());
  std::vector<double> lv(v.size());
  disc.apply_laplacian(v, lv);
  kernels::active().axpby(alpha, v.data(), 1.0, lv.data(), v.size());
  return inner_h(disc, u, lv);
}

double norm_X(const Discretization& disc, double alpha, std::span<const double> u) {
  return std::sqrt(std::max(0.0, inner_X(disc, alpha, u, u)));
}

double energy(const Discretization& disc, const Problem& problem, std::span<const double> u,
              std::span<const double> lap_u) {
  const auto& k = kernels::active();
  const std::size_t n = u.size();
  const double* w = disc.weights().data();
  const double kinetic = k.wdot(w, u.data(), lap_u.data(), n);
  std::vector<double> vu(n);
  k.hadamard(problem.potential.data(), u.data(), vu.data(), n);
  const double pot = k.wdot(w, u.data(), vu.data(), n);
  const double quartic = problem.beta != 0.0 ? k.wquartic(w, u.data(), n) : 0.0;
  return 0.5 * kinetic + 0.5 * pot + 0.25 * problem.beta * quartic;
}

double energy(const State& state, const Problem& problem) {
  problem.validate(state.size());
  std::vector<double> lap(state.size());
  state.disc().apply_laplacian(state.u(), lap);
  return energy(state.disc(), problem, state.u(), lap);
}

void apply_Au(const Discretization& disc, const Problem& problem, std::span<const double> u,
              std::span<const double> w, std::span<double> out) {
  require_length(disc.size(), u.size());
  require_length(disc.size(), w.size());
  require_length(disc.size(), out.size());
  require_length(disc.size(), problem.potential.size());
  disc.apply_laplacian(w, out);
  kernels::active().add_potential(problem.potential.data(), problem.beta, u.data(), w.data(), out.data(), w.size());
}

std::vector<double> apply_Au(const State& state, const Problem& problem, std::span<const double> w) {
  std::vector<double> out(state.size());
  apply_Au(state.disc(), problem, state.u(), w, out);
  return out;
}

std::vector<double> sobolev_gradient(const State& state, const Problem& problem) {
  const std::vector<double> au = apply_Au(state, problem, state.u());
  std::vector<double> g(state.size());
  state.disc().solve_shifted(problem.alpha, au, g);
  return g;
}

std::vector<double> riemannian_gradient(const State& state, const Problem& problem) {
  require_normalized(state);
  const Discretization& disc = state.disc();
  std::vector<double> g = sobolev_gradient(state, problem);
  std::vector<double> gu(state.size());
  disc.solve_shifted(problem.alpha, state.u(), gu);
  const double gamma = inner_h(disc, state.u(), g) / inner_h(disc, state.u(), gu);
  kernels::active().axpby(-gamma, gu.data(), 1.0, g.data(), g.size());
  return g;
}

State retract(DiscretizationPtr disc, std::vector<double> u) {
  if (!disc) throw InvalidArgument("retract needs a discretization");
  const double nrm2 = inner_h(*disc, u, u);
  if (!(nrm2 > 0.0) || !std::isfinite(nrm2)) throw InvalidArgument("cannot normalize a zero or non-finite vector");
  const double s = 1.0 / std::sqrt(nrm2);
  for (double& x : u) x *= s;
  return State(std::move(disc), std::move(u));
}

double residual(const Discretization& disc, std::span<const double> u, std::span<const double> au, ResidualNorm norm) {
  const std::size_t n = u.size();
  double nu, nw;
  if (norm == ResidualNorm::Weighted) {
    nu = std::sqrt(inner_h(disc, u, u));
    nw = std::sqrt(inner_h(disc, au, au));
  } else {
    nu = euclid(u);
    nw = euclid(au);
  }
  if (!(nu > 0.0) || !(nw > 0.0)) throw InvalidArgument("residual of a zero vector");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = u[i] / nu - au[i] / nw;
  return norm == ResidualNorm::Weighted ? std::sqrt(inner_h(disc, d, d)) : euclid(d);
}

double residual(const State& state, const Problem& problem, ResidualNorm norm) {
  const std::vector<double> au = apply_Au(state, problem, state.u());
  return residual(state.disc(), state.u(), au, norm);
}

EigenvalueEstimate eigenvalue_estimate(const State& state, const Problem& problem) {
  require_normalized(state);
  const std::vector<double> au = apply_Au(state, problem, state.u());
  EigenvalueEstimate e;
  e.lambda = inner_h(state.disc(), state.u(), au);
  const double rho = kernels::active().wquartic(state.disc().weights().data(), state.u().data(), state.size());
  e.check = 2.0 * energy(state, problem) + 0.5 * problem.beta * rho;
  return e;
}

Evaluation evaluate(const State& state, const Problem& problem, ResidualNorm norm) {
  const Discretization& disc = state.disc();
  const std::size_t n = state.size();
  Evaluation ev;
  ev.lap.resize(n);
  disc.apply_laplacian(state.u(), ev.lap);
  ev.au = ev.lap;
  kernels::active().add_potential(problem.potential.data(), problem.beta, state.u().data(), state.u().data(),
                                  ev.au.data(), n);
  ev.energy = energy(disc, problem, state.u(), ev.lap);
  ev.lambda = inner_h(disc, state.u(), ev.au) / state.norm2();
  ev.residual = residual(disc, state.u(), ev.au, norm);
  return ev;
}

}  // namespace gpflow
