#pragma once

#include <stdexcept>
#include <string>

namespace borda {

/// Raised when a caller violates an operation's precondition (bad dimensions,
/// out-of-domain points, empty grids, malformed configuration).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a linear-algebra step cannot proceed, e.g. a Gram matrix that
/// is not positive definite after jitter.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace borda
