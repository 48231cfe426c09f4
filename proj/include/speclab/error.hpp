#pragma once

#include <stdexcept>
#include <string>

namespace speclab {

// Input violates a documented precondition. The CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure could not deliver a trustworthy answer: a pole, a
// degenerate gap, a non-convergent extrapolation, an exhausted refinement.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace speclab
