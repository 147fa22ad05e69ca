#include "gpflow/grid.hpp"

#include <algorithm>
#include <cctype>

#include "gpflow/errors.hpp"
#include "gpflow/quadrature.hpp"

namespace gpflow {

std::string Scheme::name() const {
  switch (kind) {
    case SchemeKind::FD2:
      return "FD2";
    case SchemeKind::COMPACT4:
      return "COMPACT4";
    case SchemeKind::SEM:
      return "SEM(" + std::to_string(degree) + ")";
  }
  return "?";
}

Scheme Scheme::parse(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  if (t == "FD2" || t == "FD") return fd2();
  if (t == "COMPACT4" || t == "C4" || t == "FD4") return compact4();
  std::string digits;
  if (t.rfind("SEM", 0) == 0) {
    digits = t.substr(3);
  } else if (t.rfind("Q", 0) == 0) {
    digits = t.substr(1);
  } else {
    throw InvalidArgument("unknown scheme '" + text + "'");
  }
  if (!digits.empty() && digits.front() == '(' && digits.back() == ')') digits = digits.substr(1, digits.size() - 2);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw InvalidArgument("unknown scheme '" + text + "'");
  }
  const int k = std::stoi(digits);
  if (k < 1) throw InvalidArgument("SEM degree must be >= 1 in '" + text + "'");
  return sem(k);
}

void GridSpec::validate() const {
  if (!(half_width > 0.0)) throw InvalidArgument("half_width must be positive");
  if (dim < 1 || dim > 3) throw InvalidArgument("dim must be 1, 2 or 3, got " + std::to_string(dim));
  if (cells < 2) throw InvalidArgument("cells_per_dim must be >= 2, got " + std::to_string(cells));
  if (scheme.kind == SchemeKind::SEM && scheme.degree < 1) throw InvalidArgument("SEM degree must be >= 1");
  if (interior_per_dim() < 1) throw InvalidArgument("grid has no interior unknowns");
}

int GridSpec::interior_per_dim() const {
  const int k = scheme.kind == SchemeKind::SEM ? scheme.degree : 1;
  return cells * k - 1;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(interior_per_dim());
  return n;
}

Eigen::MatrixXd Operator1D::laplacian() const {
  const int n = size();
  Eigen::MatrixXd l(n, n);
  for (int i = 0; i < n; ++i) l.row(i) = stiffness.row(i) / weights[i];
  if (mass_aux) l = mass_aux->ldlt().solve(l);
  return l;
}

Eigen::MatrixXd Operator1D::energy_stiffness() const {
  if (!mass_aux) return stiffness;
  Eigen::MatrixXd s = laplacian();
  for (int i = 0; i < size(); ++i) s.row(i) *= weights[i];
  return 0.5 * (s + s.transpose());
}

namespace {

Operator1D build_fd(const GridSpec& spec) {
  const int n = spec.interior_per_dim();
  const double h = spec.cell_width();
  Operator1D op;
  op.scheme = spec.scheme;
  op.cell_width = h;
  op.nodes.resize(n);
  op.weights.assign(n, h);
  for (int i = 0; i < n; ++i) op.nodes[i] = -spec.half_width + (i + 1) * h;
  const double inv_h = 1.0 / h;
  op.stiffness = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    op.stiffness(i, i) = 2.0 * inv_h;
    if (i > 0) op.stiffness(i, i - 1) = -inv_h;
    if (i + 1 < n) op.stiffness(i, i + 1) = -inv_h;
  }
  if (spec.scheme.kind == SchemeKind::COMPACT4) {
    // Pade compact Laplacian: -Delta_h = T^{-1} K with T = tridiag(1, 10, 1) / 12.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      t(i, i) = 10.0 / 12.0;
      if (i > 0) t(i, i - 1) = 1.0 / 12.0;
      if (i + 1 < n) t(i, i + 1) = 1.0 / 12.0;
    }
    op.mass_aux = std::move(t);
  }
  return op;
}

Operator1D build_sem(const GridSpec& spec) {
  const int k = spec.scheme.degree;
  const int nc = spec.cells;
  const double hcell = spec.cell_width();
  const QuadratureRule rule = gauss_lobatto_rule(k);
  const std::vector<double> dmat = lagrange_derivative_matrix(rule.nodes);
  const int m = k + 1;

  // Element stiffness with the (k+1)-point rule; exact since l_a' l_b' has degree 2k-2.
  Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int q = 0; q < m; ++q) s += rule.weights[q] * dmat[q * m + a] * dmat[q * m + b];
      ke(a, b) = s * (2.0 / hcell);
    }
  }
  ke = 0.5 * (ke + ke.transpose()).eval();

  const int nglobal = nc * k + 1;
  Eigen::MatrixXd sfull = Eigen::MatrixXd::Zero(nglobal, nglobal);
  std::vector<double> wfull(nglobal, 0.0);
  std::vector<double> xfull(nglobal, 0.0);
  for (int e = 0; e < nc; ++e) {
    const double left = -spec.half_width + e * hcell;
    for (int a = 0; a < m; ++a) {
      const int ga = e * k + a;
      wfull[ga] += rule.weights[a] * hcell / 2.0;
      xfull[ga] = left + (rule.nodes[a] + 1.0) * hcell / 2.0;
      for (int b = 0; b < m; ++b) sfull(ga, e * k + b) += ke(a, b);
    }
  }

  const int n = nglobal - 2;
  Operator1D op;
  op.scheme = spec.scheme;
  op.cell_width = hcell;
  op.nodes.assign(xfull.begin() + 1, xfull.end() - 1);
  op.weights.assign(wfull.begin() + 1, wfull.end() - 1);
  op.stiffness = sfull.block(1, 1, n, n);
  return op;
}

}  // namespace

Operator1D build_1d(const GridSpec& spec) {
  spec.validate();
  if (spec.scheme.kind == SchemeKind::SEM) return build_sem(spec);
  return build_fd(spec);
}

}  // namespace gpflow
