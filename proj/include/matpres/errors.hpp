#pragma once

#include <stdexcept>
#include <string>

namespace matpres {

// Input data that violates a format or structural contract (bad JSON shape,
// Hermitian defect over tolerance, mismatched dimensions in a file, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A structurally valid operator table whose image matrices fail Hermiticity.
class NonHermitianImageError : public ValidationError {
 public:
  NonHermitianImageError(const std::string& what, int i, int j)
      : ValidationError(what), i(i), j(j) {}
  int i, j;
};

// Dimension mismatch between in-memory objects.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Polynomial degree exceeding a declared truncation bound d.
class DegreeError : public std::domain_error {
 public:
  explicit DegreeError(const std::string& what) : std::domain_error(what) {}
};

// Numeric machinery failure (eigensolver non-convergence, binomial overflow).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace matpres
