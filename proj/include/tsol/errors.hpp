#pragma once

#include <stdexcept>
#include <string>

namespace tsol {

// Precondition or shape violation in caller-supplied data.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Kernel matrix not factorizable (duplicate points, or jitter budget exhausted).
class DegenerateMatrix : public NumericalError {
 public:
  explicit DegenerateMatrix(const std::string& what) : NumericalError(what) {}
};

// Truncation region of a multivariate normal has (numerically) zero mass.
class DegenerateTruncation : public NumericalError {
 public:
  explicit DegenerateTruncation(const std::string& what) : NumericalError(what) {}
};

}  // namespace tsol
