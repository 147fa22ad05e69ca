#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace gpflow {

enum class SchemeKind { FD2, COMPACT4, SEM };

struct Scheme {
  SchemeKind kind = SchemeKind::FD2;
  int degree = 1;  // polynomial degree k; meaningful for SEM only

  static Scheme fd2() { return {SchemeKind::FD2, 1}; }
  static Scheme compact4() { return {SchemeKind::COMPACT4, 1}; }
  static Scheme sem(int k) { return {SchemeKind::SEM, k}; }

  /// "FD2", "COMPACT4", "SEM(k)".
  std::string name() const;
  /// Accepts FD2, COMPACT4 (or C4), SEM(k), SEMk, Qk (case-insensitive).
  static Scheme parse(const std::string& text);
  /// FD2 and SEM(1) are M-matrix (monotone) schemes.
  bool monotone() const { return kind == SchemeKind::FD2 || (kind == SchemeKind::SEM && degree == 1); }

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// Uniform tensor grid on [-L, L]^d with homogeneous Dirichlet boundary.
struct GridSpec {
  double half_width = 1.0;  // L
  int dim = 1;              // d in {1, 2, 3}
  int cells = 2;            // N_c cells per dimension
  Scheme scheme;

  /// Throws InvalidArgument when L <= 0, d not in {1,2,3}, N_c < 2 or k < 1.
  void validate() const;
  /// Interior unknowns per dimension: N_c*k - 1 (SEM) or N_c - 1.
  int interior_per_dim() const;
  /// Total unknowns n^d.
  std::size_t size() const;
  /// Cell width 2L / N_c.
  double cell_width() const { return 2.0 * half_width / cells; }
};

/// One-dimensional operator bundle on the interior nodes.
struct Operator1D {
  Scheme scheme;
  double cell_width = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;  // diagonal of the (lumped) mass matrix M
  Eigen::MatrixXd stiffness;    // S, symmetric
  std::optional<Eigen::MatrixXd> mass_aux;  // T, COMPACT4 only

  int size() const { return static_cast<int>(nodes.size()); }

  /// Dense 1D -Delta_h: M^{-1} S, or T^{-1} M^{-1} S for COMPACT4.
  Eigen::MatrixXd laplacian() const;

  /// Symmetric bilinear form of the discrete gradient, M (-Delta_h). Equals S
  /// except for COMPACT4 where it is M T^{-1} M^{-1} S (dense, symmetric).
  Eigen::MatrixXd energy_stiffness() const;
};

/// Builds the 1D operator for the scheme of `spec` (validated first).
Operator1D build_1d(const GridSpec& spec);

}  // namespace gpflow
