#pragma once

#include <stdexcept>
#include <string>

namespace dispcert {

// Bad input or a violated precondition. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A bound that is infinite because the data cannot constrain it (missing
// support_max, zero losses under a negative power). The CLI maps it to exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical procedure failed to meet its own convergence criterion.
class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dispcert
