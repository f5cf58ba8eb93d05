#pragma once

#include <stdexcept>
#include <string>

namespace ranksurf {

/// Linear-algebra failure that survived all recovery attempts (e.g. a Gram
/// matrix that is not positive definite after jitter escalation).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Too few observations to identify the requested model.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace ranksurf
