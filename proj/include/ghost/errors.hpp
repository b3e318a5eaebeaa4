#pragma once

#include <stdexcept>
#include <string>

namespace ghost {

// Invalid configuration or input detected before any computation (CLI exit 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (negative density,
// phi outside (0, 1/12] for the bottleneck roots, ...). Treated as a configuration error.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Base for failures that happen while computing (CLI exit 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PopulationExplosionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class WindowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RegimeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OverlapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace ghost
