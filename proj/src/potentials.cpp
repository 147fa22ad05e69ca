#include "gpflow/potentials.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include "gpflow/errors.hpp"

namespace gpflow {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

double sin2_product(const double* x, int dim) {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) {
    const double s = std::sin(std::numbers::pi * x[a] / 4.0);
    v *= s * s;
  }
  return v;
}

double harmonic_lattice(const double* x, int dim) {
  double r2 = 0.0, lattice = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double s = std::sin(std::numbers::pi * x[a] / 4.0);
    r2 += x[a] * x[a];
    lattice += s * s;
  }
  return r2 + 100.0 * lattice;
}

double exact_ground_state(const double* x, int dim) {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= std::sin(std::numbers::pi * (x[a] + 1.0) / 2.0);
  return v;
}

PotentialSpec PotentialSpec::parse(const std::string& text) {
  const std::string t = trim(text);
  std::string head = lower(t), arg;
  const auto open = t.find('(');
  if (open != std::string::npos) {
    if (t.back() != ')') throw InvalidArgument("potential '" + text + "': missing ')'");
    head = lower(trim(t.substr(0, open)));
    arg = trim(t.substr(open + 1, t.size() - open - 2));
  }
  PotentialSpec p;
  if (head == "exact_case") {
    p.kind = Kind::ExactCase;
  } else if (head == "sin2_product") {
    p.kind = Kind::Sin2Product;
  } else if (head == "harmonic_lattice") {
    p.kind = Kind::HarmonicLattice;
  } else if (head == "constant") {
    p.kind = Kind::Constant;
    if (arg.empty()) throw InvalidArgument("potential constant(c) needs a value");
    std::size_t used = 0;
    try {
      p.value = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || !std::isfinite(p.value)) throw InvalidArgument("potential constant: invalid value '" + arg + "'");
    if (p.value < 0.0) throw InvalidArgument("potential constant must be nonnegative");
  } else if (head == "file") {
    p.kind = Kind::File;
    if (arg.empty()) throw InvalidArgument("potential file(path) needs a path");
    p.path = arg;
  } else {
    throw InvalidArgument("unknown potential '" + text + "'");
  }
  if (!arg.empty() && p.kind != Kind::Constant && p.kind != Kind::File) {
    throw InvalidArgument("potential '" + head + "' takes no argument");
  }
  return p;
}

std::string PotentialSpec::name() const {
  switch (kind) {
    case Kind::ExactCase:
      return "exact_case";
    case Kind::Sin2Product:
      return "sin2_product";
    case Kind::HarmonicLattice:
      return "harmonic_lattice";
    case Kind::Constant:
      return "constant";
    case Kind::File:
      return "file";
  }
  return "?";
}

std::vector<double> PotentialSpec::evaluate(const Discretization& disc, double beta) const {
  switch (kind) {
    case Kind::ExactCase: {
      if (const auto* t = dynamic_cast<const TensorDiscretization*>(&disc); !t || t->spec().half_width != 1.0) {
        throw InvalidArgument("exact_case potential needs the domain [-1, 1]^d");
      }
      return sample(disc, [beta](const double* x, int d) {
        const double u = exact_ground_state(x, d);
        return beta * (1.0 - u * u);
      });
    }
    case Kind::Sin2Product:
      return sample(disc, sin2_product);
    case Kind::HarmonicLattice:
      return sample(disc, harmonic_lattice);
    case Kind::Constant:
      return std::vector<double>(disc.size(), value);
    case Kind::File: {
      std::ifstream in(path);
      if (!in) throw InvalidArgument("cannot open potential file '" + path + "'");
      std::vector<double> v;
      double x;
      while (in >> x) v.push_back(x);
      if (!in.eof()) throw InvalidArgument("potential file '" + path + "': non-numeric entry after value " + std::to_string(v.size()));
      require_length(disc.size(), v.size());
      return v;
    }
  }
  return {};
}

}  // namespace gpflow
