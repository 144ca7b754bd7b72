#pragma once

#include <stdexcept>
#include <string>

namespace rscat {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration-class errors: bad input, bad files, bad preconditions.
// The CLI maps these to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class IoError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Requested data (frequencies, directions, mirror partners) not present.
class CoverageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numeric failures. The CLI maps these to exit code 1.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Born/Neumann iteration is not contracting.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, double contraction)
      : NumericError(what), contraction_(contraction) {}
  double contraction() const noexcept { return contraction_; }

 private:
  double contraction_;
};

/// Iteration budget exhausted above tolerance.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double last_update)
      : NumericError(what), last_update_(last_update) {}
  double last_update() const noexcept { return last_update_; }

 private:
  double last_update_;
};

/// An oracle could not certify its own tolerance.
class OracleError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace rscat
