#pragma once

#include <stdexcept>
#include <string>

namespace wavelqr {

/// Malformed or out-of-range user input (config documents, invalid modes).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A solver could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wavelqr
