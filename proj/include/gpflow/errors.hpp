#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user-supplied parameter (degree, grid size, config value, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Vector length does not match the operator it is applied to.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected length " + std::to_string(expected) + ", got " +
              std::to_string(got)),
        expected_(expected),
        got_(got) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

/// A documented precondition was violated (non-normalized state, asymmetric matrix).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Mesh assembly failure; carries the offending triangle.
class AssemblyError : public Error {
 public:
  AssemblyError(const std::string& what, std::size_t triangle)
      : Error(what + " (triangle " + std::to_string(triangle) + ")"), triangle_(triangle) {}
  std::size_t triangle() const noexcept { return triangle_; }

 private:
  std::size_t triangle_;
};

/// An iterative method ran out of budget or broke down.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

inline void require_length(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

}  // namespace gpflow
