#pragma once

#include <stdexcept>
#include <string>

namespace matchbench {

// Bad input: malformed config, violated precondition, shape mismatch.
// The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a trustworthy number: singular
// moments, quadrature that failed to converge, degenerate indices.
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace matchbench
