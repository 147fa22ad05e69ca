#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "gpflow/discretization.hpp"
#include "gpflow/eigenpairs.hpp"
#include "gpflow/energy.hpp"
#include "gpflow/flows.hpp"

namespace gpflow {

/// Manufactured problem on [-1, 1]^d with V = beta (1 - u*^2) and
/// u* = prod sin(pi (x_i + 1) / 2), whose ground state is u* itself.
struct ExactCase {
  double beta = 0.0;
  int dim = 1;
  std::vector<double> potential;
  std::vector<double> ustar;
  double lambda_star = 0.0;  // d pi^2 / 4 + beta
  double energy_star = 0.0;  // lambda*/2 - beta/4 (3/4)^d
  double rho_bar = 0.0;      // (3/4)^d
};

/// Throws InvalidArgument unless the domain is [-1, 1]^d.
ExactCase exact_case(int dim, double beta, const TensorDiscretization& disc);

struct ConvergenceRow {
  Scheme scheme;
  int cells = 0;
  int unknowns_per_dim = 0;
  double h = 0.0;
  double eig_error = 0.0;
  double energy_error = 0.0;
  double state_error = 0.0;  // max over all nodes of |u_h - u*|
  double eig_order = 0.0;    // NaN on the first level of a scheme
  double energy_order = 0.0;
  double state_order = 0.0;
  double lambda = 0.0;
  double energy = 0.0;
  int iterations = 0;  // iteration of the smallest residual
  Termination reason = Termination::MaxIter;
  bool converged = false;
  double wall_seconds = 0.0;
};

struct StudyOptions {
  double alpha = 0.2;
  double tau = 1.0;
  StopRule stop{1e-12, 10, 200};
};

/// Solves the exact case for each scheme at each cell count with the modified
/// H1 flow from the normalized constant, and tabulates errors and log2 orders
/// between successive levels of the same scheme.
std::vector<ConvergenceRow> convergence_study(const std::vector<Scheme>& schemes, const std::vector<int>& cells,
                                              int dim, double beta, const StudyOptions& options = {});
ConvergenceRow solve_exact_case(const GridSpec& spec, double beta, const StudyOptions& options = {});
/// Fills the order columns from log2 of successive error ratios.
void fill_orders(std::vector<ConvergenceRow>& rows);

/// -Delta_h as a sparse matrix (Kronecker sum of the 1D operators, or
/// M^{-1} S on a mesh); exact zeros are dropped.
SparseMatrix sparse_laplacian(const Discretization& disc);
/// A_u = -Delta_h + V + beta diag(u^2) as a sparse matrix.
SparseMatrix assemble_Au(const Discretization& disc, const Problem& problem, std::span<const double> u);

struct MMatrixReport {
  bool passes_sufficient = false;
  std::string witness;  // first violated condition, empty when passing
};

/// Sufficient M-matrix test: positive diagonal, nonpositive off-diagonals,
/// nonnegative row sums with at least one positive.
MMatrixReport m_matrix_check(const SparseMatrix& a);

/// Explicit inverse is entrywise >= -1e-12 ||A^{-1}||_max. n <= 200;
/// throws InvalidArgument when larger, ContractViolation when singular.
bool monotonicity_oracle(const Eigen::MatrixXd& a);

struct PerronReport {
  bool ok = false;
  double gap = 0.0;
  double min_entry = 0.0;  // min of the sign-normalized v0
  EigenResult eig;
};

PerronReport perron_check(const LinearMap& apply_A, std::span<const double> weights, const EigenOptions& options = {},
                          double tol = 1e-9);

/// Two lowest eigenpairs of A_u, with (-Delta_h + mean(V + beta u^2))^{-1} as
/// the inner preconditioner.
EigenResult linearized_eigenpairs(const Discretization& disc, const Problem& problem, std::span<const double> u,
                                  double tol = 1e-9);

struct EigengapRow {
  double h = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double gap = 0.0;
  int flow_iterations = 0;
};

struct EigengapSummary {
  double min_gap = 0.0;
  double max_gap = 0.0;
  double spread = 0.0;           // (max - min) / max
  bool bounded_below = false;    // every gap >= half the coarsest gap
  bool all_positive = false;
};

/// Converges the ground state on each grid (modified H1 flow) and computes the
/// spectrum gap of the linearized operator there. `potential` is a catalog
/// name understood by PotentialSpec.
std::vector<EigengapRow> eigengap_study(const std::vector<GridSpec>& specs, const std::string& potential, double beta,
                                        const FlowConfig& flow = {}, const StopRule& stop = {1e-11, 10, 500});
EigengapSummary summarize(const std::vector<EigengapRow>& rows);

struct ConvexityReport {
  bool supported = false;
  bool hessian_psd = false;
  bool abs_inequality = false;
  double worst_hessian_ratio = 0.0;  // min over samples of lambda_min(H) / ||H||_max
  double worst_abs_gap = 0.0;        // min over samples of E(u) - E(|u|)
  int samples = 0;
};

/// (a) finite-difference Hessian of v -> E_h(sqrt v) is PSD at random positive
/// normalized v (central differences of the analytic gradient, step 1e-5);
/// (b) E_h(u) >= E_h(|u|) - 1e-12 at random u. Only monotone discretizations
/// are supported; others return supported = false. Hessians need size() <= 400.
ConvexityReport convexity_check(const Discretization& disc, const Problem& problem, int samples,
                                std::uint64_t seed = 0);

struct RateFit {
  double rate = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least-squares slope of log residual over the trailing fraction of the
/// sequence; rate = exp(slope). Needs >= 10 positive points in the tail.
RateFit rate_fit(std::span<const double> residuals, double tail_fraction);
/// Same over the leading records of a run, stopping where the residual comes
/// within 100x of its smallest value (the round-off plateau).
RateFit rate_fit(const RunReport& report, double tail_fraction);

}  // namespace gpflow
