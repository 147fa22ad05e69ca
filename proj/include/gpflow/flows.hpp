#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gpflow/energy.hpp"

namespace gpflow {

enum class FlowKind { MODIFIED_H1, H1_SEMINORM, L2, A0, AU, BFSP };

std::string to_string(FlowKind kind);
/// Case-insensitive; accepts "modified_h1"/"h1", "h1_seminorm", "l2", "a0", "au", "bfsp".
FlowKind parse_flow_kind(const std::string& text);

struct FixedStep {
  double tau = 1.0;
};

struct LineSearch {
  double lo = 1e-3;
  double hi = 4.0;
  double tol = 1e-4;
  int max_evals = 100;
};

struct FlowConfig {
  FlowKind kind = FlowKind::MODIFIED_H1;
  double alpha = 0.15;  // metric shift (MODIFIED_H1); ignored by H1_SEMINORM
  std::variant<FixedStep, LineSearch> step = FixedStep{};
  double dt = 0.1;                     // BFSP time step
  std::optional<double> bfsp_shift;    // BFSP stabilization; empty picks (max b + min b)/2, b = V + beta u^2
  ResidualNorm residual_norm = ResidualNorm::Euclidean;

  void validate() const;
};

struct StopRule {
  double residual_tol = 1e-10;
  int stall_window = 10;
  int max_iter = 1000;

  void validate() const;
};

struct IterationRecord {
  int index = 0;
  double energy = 0.0;
  double residual = 0.0;
  double lambda = 0.0;
  double step = 0.0;          // step size used to leave this iterate (0 for the last one)
  double grad_norm_x2 = 0.0;  // ||grad^R_X E_h||_X^2 at this iterate; NaN when not defined by the flow
};

enum class Termination { Converged, Stalled, MaxIter, StepFailure };
std::string to_string(Termination t);

struct RunReport {
  std::vector<IterationRecord> records;
  std::optional<State> final_state;  // iterate with the smallest residual
  Termination reason = Termination::MaxIter;
  std::string message;
  double wall_seconds = 0.0;
  int best_iteration = 0;

  /// Number of steps taken.
  int iterations() const { return records.empty() ? 0 : records.back().index; }
  /// Converged by tolerance or by residual stall.
  bool succeeded() const { return reason == Termination::Converged || reason == Termination::Stalled; }
  /// First iteration whose residual is <= tol, or -1.
  int first_below(double tol) const;
  const IterationRecord& best() const { return records.at(best_iteration); }
};

/// u^{n+1} = R_h(u^n - tau grad^R_X E_h(u^n)) with the metric shift problem.alpha.
State step_modified_h1(const State& state, const Problem& problem, double tau);

/// Backward-forward Euler with stabilization shift `shift`.
State step_bfsp(const State& state, const Problem& problem, double dt, double shift);
/// Shift (max b + min b)/2 with b = V + beta u^2.
double bfsp_optimal_shift(const State& state, const Problem& problem);

enum class Metric { L2, A0, AU };

/// Riemannian descent direction (tangent to the sphere) for the given flow at
/// `state`; L2 uses tau because its implicit metric depends on it. Not defined
/// for BFSP.
std::vector<double> descent_direction(FlowKind kind, const State& state, const Problem& problem, double tau);

/// One Riemannian step under the L2, A0 or A_u metric; inner solves by pcg.
State step_metric(const State& state, const Problem& problem, double tau, Metric metric);

/// Bounded derivative-free scalar minimization (Brent: golden section with
/// parabolic interpolation). Returns the minimizer in [lo, hi].
double bounded_minimize(const std::function<double(double)>& f, double lo, double hi, double tol, int max_evals);

/// tau* = argmin over [lo, hi] of E_h(R_h(u - tau g)); returns lo when g = 0.
/// Throws ConvergenceError when the energy is not finite along the line.
double line_search_step(const State& state, const Problem& problem, std::span<const double> g, double lo, double hi,
                        double tol, int max_evals = 100);

/// Iterates until residual <= tol, a residual stall, or max_iter. The problem's
/// alpha is replaced by the flow's.
RunReport run(const FlowConfig& flow, const Problem& problem, const State& u0, const StopRule& stop);

}  // namespace gpflow
