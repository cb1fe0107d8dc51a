#pragma once

#include <stdexcept>
#include <string>

namespace multivariance {

// Bad user input: malformed files, invalid parameters, mismatched dimensions.
// Mapped to exit code 2 by the CLI.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure (e.g. a covariance factorization that stays indefinite
// after regularization). Mapped to exit code 3 by the CLI.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace multivariance
