#pragma once

#include <stdexcept>
#include <string>

namespace capdrum {

// Bad dimension (capacity formulas need n >= 3, sphere area n >= 2).
struct InvalidDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameter outside its documented range (gamma, radii, walk counts, ...).
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Grid would exceed the configured cell budget (CAPDRUM_MAX_CELLS).
struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of iterations; carries the last residual.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& what, double last_residual)
      : std::runtime_error(what), residual(last_residual) {}
  double residual;
};

// Eigenvalue request on a grid with no interior cells.
struct EmptyDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Test-function construction collapsed to the zero field.
struct DegenerateTestFunction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Domain description JSON that does not parse into a valid tree.
struct SpecParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace capdrum
