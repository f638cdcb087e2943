#pragma once

#include <stdexcept>
#include <string>

namespace minimax {

/// NaN or infinity surfaced in an estimator or iterate. Carries the iteration
/// at which the failure was detected; runs fail fast instead of projecting
/// garbage back into the feasible set.
class numeric_failure : public std::runtime_error {
 public:
  numeric_failure(long iteration, const std::string& what)
      : std::runtime_error("numeric failure at iteration " + std::to_string(iteration) +
                           ": " + what),
        iteration_(iteration) {}

  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

/// Requested a brute-force envelope over a dual block too large to grid.
class unsupported_dimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace minimax
