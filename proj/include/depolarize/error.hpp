#pragma once

#include <stdexcept>
#include <string>

namespace depolarize {

// Input files that are missing, unreadable or malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent or invalid user configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Vector/graph sizes that do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A factorization or solve that did not meet its accuracy target.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace depolarize
