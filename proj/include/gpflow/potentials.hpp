#pragma once

#include <string>
#include <vector>

#include "gpflow/discretization.hpp"

namespace gpflow {

/// prod_i sin^2(pi x_i / 4).
double sin2_product(const double* x, int dim);
/// sum_i x_i^2 + 100 sum_i sin^2(pi x_i / 4).
double harmonic_lattice(const double* x, int dim);
/// prod_i sin(pi (x_i + 1) / 2), the exact ground state on [-1, 1]^d.
double exact_ground_state(const double* x, int dim);

/// Named potential catalog.
struct PotentialSpec {
  enum class Kind { ExactCase, Sin2Product, HarmonicLattice, Constant, File };
  Kind kind = Kind::Constant;
  double value = 0.0;  // Constant
  std::string path;    // File

  /// "exact_case", "sin2_product", "harmonic_lattice", "constant(c)", "file(path)".
  static PotentialSpec parse(const std::string& text);
  std::string name() const;

  /// Values at the unknowns. ExactCase gives beta (1 - u*^2) and requires the
  /// domain [-1, 1]^d; File reads one value per unknown in storage order.
  std::vector<double> evaluate(const Discretization& disc, double beta) const;
};

/// f evaluated at every unknown.
template <class F>
std::vector<double> sample(const Discretization& disc, F&& f) {
  std::vector<double> out(disc.size());
  double x[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    disc.node(i, x);
    out[i] = f(static_cast<const double*>(x), disc.dim());
  }
  return out;
}

}  // namespace gpflow
