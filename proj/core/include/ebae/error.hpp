#pragma once

#include <stdexcept>
#include <string>

namespace ebae {

/// Malformed or inconsistent dataset / schema input.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown or malformed configuration key/value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A learner could not be fitted on the given training data.
class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A statistic is undefined for the given input (zero variance, too few samples).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ebae
