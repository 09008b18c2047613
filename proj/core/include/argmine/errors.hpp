#pragma once

#include <stdexcept>
#include <string>

namespace argmine {

// Bad or missing input data (malformed records, absent files, schema trouble).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or invalid call arguments.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (singular system, non-convergence that cannot be rescued).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace argmine
