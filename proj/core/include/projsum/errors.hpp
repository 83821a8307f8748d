#pragma once

#include <stdexcept>
#include <string>

namespace projsum {

/// Dimension argument was zero or otherwise unusable.
class InvalidDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A law with a single atom (or coincident atoms) was passed where the
/// hyperbola/rectangle geometry needs two distinct atoms for both p and q.
class DegenerateGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid layout not accepted by the Laplacian stencil (e.g. hx != hy).
class InvalidGrid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense eigen/singular solver failed to converge.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace projsum
