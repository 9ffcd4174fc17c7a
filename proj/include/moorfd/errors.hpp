#pragma once

#include <stdexcept>
#include <string>

namespace moorfd {

/// Bad user input: configuration values, file contents, incompatible options.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or dataset failed a structural or physical validity check.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative or numerical procedure failed (divergence, no bracket, NaN).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace moorfd
