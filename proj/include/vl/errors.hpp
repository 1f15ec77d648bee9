#pragma once

#include <stdexcept>
#include <string>

namespace vl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated precondition on user-supplied values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DarkPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoRingsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Process exit codes used by the command-line tool.
enum class ExitCode : int { ok = 0, config = 2, numerical = 3, io = 4 };

}  // namespace vl
