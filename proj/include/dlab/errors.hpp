#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

// Invalid user configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: resolution rule, quadrature budget, hypothesis
// violations detected by sampling (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class HypothesisError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dlab
