#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace gpflow {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Unstructured triangular mesh of a 2D domain. Boundary vertices carry the
/// homogeneous Dirichlet condition and are not unknowns.
struct TriMesh2D {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::uint8_t> boundary;  // 1 for Dirichlet vertices

  /// Throws InvalidArgument if indices are out of range, a triangle has
  /// non-positive signed area, or an edge is shared by more than two triangles.
  void validate() const;
  std::size_t interior_count() const;
};

/// Signed area of triangle t (positive for counter-clockwise orientation).
double signed_area(const TriMesh2D& mesh, std::size_t t);

/// Reorders clockwise triangles to counter-clockwise in place.
void orient_counter_clockwise(TriMesh2D& mesh);

/// Plain-text format: "V T", V lines "x y boundary_flag", T lines "i j k" (0-based).
TriMesh2D read_mesh(std::istream& in);
TriMesh2D read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const TriMesh2D& mesh);

/// Unit square [x0, x1]^2 split into nx^2 squares, each cut by one diagonal
/// (lower-left to upper-right).
TriMesh2D structured_mesh(int nx, double x0 = 0.0, double x1 = 1.0);

/// Delaunay triangulation (Bowyer-Watson) of the given points.
TriMesh2D delaunay_mesh(const std::vector<std::array<double, 2>>& points,
                        const std::vector<std::uint8_t>& boundary);

/// P1 stiffness with vertex-lumped mass, restricted to interior vertices.
struct AssembledOperator {
  SparseMatrix stiffness;       // interior x interior
  SparseMatrix full_stiffness;  // all vertices, before boundary elimination
  std::vector<double> weights;  // lumped mass per interior vertex
  std::vector<int> interior_vertices;  // interior index -> vertex index
  std::vector<int> vertex_to_interior; // vertex index -> interior index or -1
};

/// Cotangent assembly: S_ij = -(cot a + cot b)/2 on edge ij; diagonal makes the
/// full row sums zero; mass weight = one third of the incident triangle area.
/// Throws AssemblyError (with the triangle index) on a degenerate triangle.
AssembledOperator p1_assemble(const TriMesh2D& mesh);

struct MonotonicityReport {
  bool ok = true;
  std::pair<int, int> worst_edge{-1, -1};
  double worst_value = 0.0;  // min over edges of (cot a + cot b)
};

/// Checks cot a + cot b >= -tol over every edge touching an interior vertex.
MonotonicityReport mesh_monotonicity_check(const TriMesh2D& mesh, double tol = 1e-12);

/// Discrete Dirichlet form by the edge formula: sum over edges of
/// w_E (u_i - u_j)(v_i - v_j) with w_E the summed halved cotangents; u and v are
/// per-vertex values (boundary entries included).
double p1_edge_form(const TriMesh2D& mesh, const std::vector<double>& u, const std::vector<double>& v);

}  // namespace gpflow
