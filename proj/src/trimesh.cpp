#include "gpflow/trimesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include "gpflow/errors.hpp"

namespace gpflow {

namespace {

using Edge = std::pair<int, int>;

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// cot of the angle at vertex c opposite the edge (a, b), for a triangle with
// doubled signed area `twice_area` (> 0).
double cot_opposite(const TriMesh2D& m, int a, int b, int c, double twice_area) {
  const auto& pa = m.vertices[a];
  const auto& pb = m.vertices[b];
  const auto& pc = m.vertices[c];
  const double ex = pa[0] - pc[0], ey = pa[1] - pc[1];
  const double fx = pb[0] - pc[0], fy = pb[1] - pc[1];
  return (ex * fx + ey * fy) / twice_area;
}

// Sum of opposite-angle cotangents per edge.
std::map<Edge, double> edge_cotangents(const TriMesh2D& mesh) {
  std::map<Edge, double> cots;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double twice = 2.0 * signed_area(mesh, t);
    if (!(std::abs(twice) > 0.0)) throw AssemblyError("degenerate triangle with zero area", t);
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3], c = tri[(e + 2) % 3];
      cots[make_edge(a, b)] += cot_opposite(mesh, a, b, c, std::abs(twice));
    }
  }
  return cots;
}

}  // namespace

double signed_area(const TriMesh2D& mesh, std::size_t t) {
  const auto& tri = mesh.triangles[t];
  const auto& a = mesh.vertices[tri[0]];
  const auto& b = mesh.vertices[tri[1]];
  const auto& c = mesh.vertices[tri[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void orient_counter_clockwise(TriMesh2D& mesh) {
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (signed_area(mesh, t) < 0.0) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
  }
}

void TriMesh2D::validate() const {
  if (boundary.size() != vertices.size()) throw InvalidArgument("boundary mask size differs from vertex count");
  const int nv = static_cast<int>(vertices.size());
  std::map<Edge, int> count;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int v : triangles[t]) {
      if (v < 0 || v >= nv) throw InvalidArgument("triangle " + std::to_string(t) + " references vertex out of range");
    }
    if (!(signed_area(*this, t) > 0.0)) {
      throw InvalidArgument("triangle " + std::to_string(t) + " has non-positive signed area");
    }
    for (int e = 0; e < 3; ++e) {
      if (++count[make_edge(triangles[t][e], triangles[t][(e + 1) % 3])] > 2) {
        throw InvalidArgument("edge shared by more than two triangles at triangle " + std::to_string(t));
      }
    }
  }
}

std::size_t TriMesh2D::interior_count() const {
  return static_cast<std::size_t>(std::count(boundary.begin(), boundary.end(), std::uint8_t{0}));
}

TriMesh2D read_mesh(std::istream& in) {
  std::size_t nv = 0, nt = 0;
  if (!(in >> nv >> nt)) throw InvalidArgument("mesh: cannot read header 'V T'");
  TriMesh2D mesh;
  mesh.vertices.resize(nv);
  mesh.boundary.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    int flag = 0;
    if (!(in >> mesh.vertices[i][0] >> mesh.vertices[i][1] >> flag)) {
      throw InvalidArgument("mesh: cannot read vertex " + std::to_string(i));
    }
    mesh.boundary[i] = flag != 0 ? 1 : 0;
  }
  mesh.triangles.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    auto& tri = mesh.triangles[t];
    if (!(in >> tri[0] >> tri[1] >> tri[2])) throw InvalidArgument("mesh: cannot read triangle " + std::to_string(t));
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= nv) {
        throw InvalidArgument("mesh: triangle " + std::to_string(t) + " references vertex out of range");
      }
    }
  }
  orient_counter_clockwise(mesh);
  mesh.validate();
  return mesh;
}

TriMesh2D read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const TriMesh2D& mesh) {
  out.precision(17);
  out << mesh.vertices.size() << ' ' << mesh.triangles.size() << '\n';
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    out << mesh.vertices[i][0] << ' ' << mesh.vertices[i][1] << ' ' << int(mesh.boundary[i]) << '\n';
  }
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

TriMesh2D structured_mesh(int nx, double x0, double x1) {
  if (nx < 2) throw InvalidArgument("structured mesh needs at least 2 cells per side");
  TriMesh2D mesh;
  const double h = (x1 - x0) / nx;
  for (int j = 0; j <= nx; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.push_back({x0 + i * h, x0 + j * h});
      mesh.boundary.push_back((i == 0 || j == 0 || i == nx || j == nx) ? 1 : 0);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

TriMesh2D delaunay_mesh(const std::vector<std::array<double, 2>>& points,
                        const std::vector<std::uint8_t>& boundary) {
  if (points.size() < 3 || boundary.size() != points.size()) throw InvalidArgument("delaunay: need >= 3 flagged points");
  double xmin = points[0][0], xmax = xmin, ymin = points[0][1], ymax = ymin;
  for (const auto& p : points) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  std::vector<std::array<double, 2>> pts = points;
  const int n = static_cast<int>(points.size());
  pts.push_back({cx - 50.0 * span, cy - 40.0 * span});
  pts.push_back({cx + 50.0 * span, cy - 40.0 * span});
  pts.push_back({cx, cy + 50.0 * span});

  struct Tri {
    std::array<int, 3> v;
    double ccx, ccy, r2;
  };
  auto make_tri = [&pts](int a, int b, int c) {
    const double ax = pts[a][0], ay = pts[a][1];
    const double bx = pts[b][0], by = pts[b][1];
    const double qx = pts[c][0], qy = pts[c][1];
    const double d = 2.0 * (ax * (by - qy) + bx * (qy - ay) + qx * (ay - by));
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = qx * qx + qy * qy;
    const double ux = (a2 * (by - qy) + b2 * (qy - ay) + c2 * (ay - by)) / d;
    const double uy = (a2 * (qx - bx) + b2 * (ax - qx) + c2 * (bx - ax)) / d;
    const double r2 = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy);
    return Tri{{a, b, c}, ux, uy, r2};
  };

  std::vector<Tri> tris{make_tri(n, n + 1, n + 2)};
  for (int p = 0; p < n; ++p) {
    const double px = pts[p][0], py = pts[p][1];
    std::vector<Tri> keep;
    std::map<Edge, int> poly;
    std::map<Edge, std::pair<int, int>> oriented;
    for (const Tri& t : tris) {
      const double dx = px - t.ccx, dy = py - t.ccy;
      if (dx * dx + dy * dy < t.r2 * (1.0 + 1e-12)) {
        for (int e = 0; e < 3; ++e) {
          const int a = t.v[e], b = t.v[(e + 1) % 3];
          ++poly[make_edge(a, b)];
          oriented[make_edge(a, b)] = {a, b};
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [edge, cnt] : poly) {
      if (cnt != 1) continue;
      const auto [a, b] = oriented[edge];
      keep.push_back(make_tri(a, b, p));
    }
    tris = std::move(keep);
  }

  TriMesh2D mesh;
  mesh.vertices = points;
  mesh.boundary = boundary;
  for (const Tri& t : tris) {
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    mesh.triangles.push_back(t.v);
  }
  orient_counter_clockwise(mesh);
  // Drop slivers produced by collinear hull points.
  std::erase_if(mesh.triangles, [&mesh](const std::array<int, 3>& t) {
    const auto& a = mesh.vertices[t[0]];
    const auto& b = mesh.vertices[t[1]];
    const auto& c = mesh.vertices[t[2]];
    const double area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    return !(area > 1e-14);
  });
  return mesh;
}

AssembledOperator p1_assemble(const TriMesh2D& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  if (mesh.boundary.size() != mesh.vertices.size()) throw InvalidArgument("boundary mask size differs from vertex count");
  AssembledOperator op;
  op.vertex_to_interior.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!mesh.boundary[v]) {
      op.vertex_to_interior[v] = static_cast<int>(op.interior_vertices.size());
      op.interior_vertices.push_back(v);
    }
  }
  if (op.interior_vertices.empty()) throw InvalidArgument("mesh has no interior vertex");

  std::vector<double> lumped(nv, 0.0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const double area = std::abs(signed_area(mesh, t));
    if (!(area > 0.0)) throw AssemblyError("degenerate triangle with zero area", t);
    for (int v : mesh.triangles[t]) lumped[v] += area / 3.0;
  }

  const auto cots = edge_cotangents(mesh);
  std::vector<Eigen::Triplet<double>> full, interior;
  std::vector<double> diag(nv, 0.0);
  for (const auto& [edge, c] : cots) {
    const double w = 0.5 * c;
    const auto [i, j] = edge;
    full.emplace_back(i, j, -w);
    full.emplace_back(j, i, -w);
    diag[i] += w;
    diag[j] += w;
    const int ii = op.vertex_to_interior[i], jj = op.vertex_to_interior[j];
    if (ii >= 0 && jj >= 0) {
      interior.emplace_back(ii, jj, -w);
      interior.emplace_back(jj, ii, -w);
    }
  }
  for (int v = 0; v < nv; ++v) {
    full.emplace_back(v, v, diag[v]);
    if (op.vertex_to_interior[v] >= 0) interior.emplace_back(op.vertex_to_interior[v], op.vertex_to_interior[v], diag[v]);
  }
  op.full_stiffness.resize(nv, nv);
  op.full_stiffness.setFromTriplets(full.begin(), full.end());
  const int ni = static_cast<int>(op.interior_vertices.size());
  op.stiffness.resize(ni, ni);
  op.stiffness.setFromTriplets(interior.begin(), interior.end());
  op.weights.resize(ni);
  for (int k = 0; k < ni; ++k) op.weights[k] = lumped[op.interior_vertices[k]];
  for (int k = 0; k < ni; ++k) {
    if (!(op.weights[k] > 0.0)) throw InvalidArgument("interior vertex " + std::to_string(op.interior_vertices[k]) + " has no incident triangle");
  }
  return op;
}

MonotonicityReport mesh_monotonicity_check(const TriMesh2D& mesh, double tol) {
  MonotonicityReport report;
  report.worst_value = std::numeric_limits<double>::infinity();
  for (const auto& [edge, c] : edge_cotangents(mesh)) {
    if (mesh.boundary[edge.first] && mesh.boundary[edge.second]) continue;
    if (c < report.worst_value) {
      report.worst_value = c;
      report.worst_edge = edge;
    }
  }
  report.ok = report.worst_value >= -tol;
  return report;
}

double p1_edge_form(const TriMesh2D& mesh, const std::vector<double>& u, const std::vector<double>& v) {
  require_length(mesh.vertices.size(), u.size());
  require_length(mesh.vertices.size(), v.size());
  double s = 0.0;
  for (const auto& [edge, c] : edge_cotangents(mesh)) {
    const auto [i, j] = edge;
    s += 0.5 * c * (u[i] - u[j]) * (v[i] - v[j]);
  }
  return s;
}

}  // namespace gpflow
