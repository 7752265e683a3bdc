// Error taxonomy shared by the library and the CLI. Exit codes: config 2, data 3, numeric 4.
#pragma once

#include <stdexcept>
#include <string>

namespace rkl {

// Bad dimensions, violated preconditions, invalid configuration values.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exitCode = 2;
};

// Unusable datasets or files: bad labels, malformed rows, too few samples.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exitCode = 3;
};

// Numerical failure: non-convergence, infeasible trust-region radius.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exitCode = 4;
};

}  // namespace rkl
