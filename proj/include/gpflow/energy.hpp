#pragma once

#include <span>
#include <vector>

#include "gpflow/discretization.hpp"

namespace gpflow {

/// Coefficient vector on the unknowns of a discretization, with <u,u>_h cached.
class State {
 public:
  State(DiscretizationPtr disc, std::vector<double> u);

  const Discretization& disc() const { return *disc_; }
  const DiscretizationPtr& disc_ptr() const { return disc_; }
  const std::vector<double>& u() const { return u_; }
  std::size_t size() const { return u_.size(); }
  double norm2() const { return norm2_; }
  bool normalized(double tol = 1e-10) const;

 private:
  DiscretizationPtr disc_;
  std::vector<double> u_;
  double norm2_;
};

/// Potential at the unknowns, interaction strength and metric shift.
struct Problem {
  std::vector<double> potential;
  double beta = 0.0;
  double alpha = 0.0;

  /// Throws InvalidArgument for negative V, beta or alpha, DimensionMismatch on size.
  void validate(std::size_t size) const;
};

/// u^T M v.
double inner_h(const Discretization& disc, std::span<const double> u, std::span<const double> v);
/// u^T (S + alpha M) v.
double inner_X(const Discretization& disc, double alpha, std::span<const double> u, std::span<const double> v);
double norm_X(const Discretization& disc, double alpha, std::span<const double> u);

/// E_h(u) = 1/2 u^T S u + 1/2 u^T M V u + beta/4 (u^2)^T M u^2.
double energy(const State& state, const Problem& problem);
/// Same, with -Delta_h u already available.
double energy(const Discretization& disc, const Problem& problem, std::span<const double> u,
              std::span<const double> lap_u);

/// out = (-Delta_h + V + beta diag(u^2)) w.
void apply_Au(const Discretization& disc, const Problem& problem, std::span<const double> u,
              std::span<const double> w, std::span<double> out);
std::vector<double> apply_Au(const State& state, const Problem& problem, std::span<const double> w);

/// (-Delta_h + alpha I)^{-1} A_u u.
std::vector<double> sobolev_gradient(const State& state, const Problem& problem);

/// Tangent projection of the Sobolev gradient; needs a normalized state.
std::vector<double> riemannian_gradient(const State& state, const Problem& problem);

/// u / ||u||_h. Throws InvalidArgument for the zero vector.
State retract(DiscretizationPtr disc, std::vector<double> u);

enum class ResidualNorm { Euclidean, Weighted };

/// || u/||u|| - w/||w|| || with w = A_u u; scale invariant in the norm of u.
double residual(const State& state, const Problem& problem, ResidualNorm norm = ResidualNorm::Euclidean);
double residual(const Discretization& disc, std::span<const double> u, std::span<const double> au,
                ResidualNorm norm = ResidualNorm::Euclidean);

struct EigenvalueEstimate {
  double lambda = 0.0;  // <u, A_u u>_h
  double check = 0.0;   // 2 E_h(u) + beta/2 <u^2, u^2>_h
};
EigenvalueEstimate eigenvalue_estimate(const State& state, const Problem& problem);

/// Everything a flow iteration needs from one A_u u product.
struct Evaluation {
  std::vector<double> lap;  // -Delta_h u
  std::vector<double> au;   // A_u u
  double energy = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
};
Evaluation evaluate(const State& state, const Problem& problem, ResidualNorm norm = ResidualNorm::Euclidean);

}  // namespace gpflow
