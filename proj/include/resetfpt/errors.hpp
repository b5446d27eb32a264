#pragma once

#include <stdexcept>
#include <string>

namespace resetfpt {

/// Base class for every error raised by the library. `category()` is the
/// stable machine-readable tag used in CLI error reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "domain"; }
};

class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* category() const noexcept override { return "config"; }
};

class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* category() const noexcept override { return "singularity"; }
};

class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* category() const noexcept override { return "degenerate"; }
};

/// Target value lies outside what the search family can produce.
class RangeError : public DomainError {
 public:
  RangeError(const std::string& what, double lo, double hi)
      : DomainError(what), lo_(lo), hi_(hi) {}
  const char* category() const noexcept override { return "range"; }
  double attainable_lo() const noexcept { return lo_; }
  double attainable_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

// Numerical procedure failed to reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "solver"; }
};

class QuadratureError : public SolverError {
 public:
  using SolverError::SolverError;
  const char* category() const noexcept override { return "quadrature"; }
};

class OptimError : public SolverError {
 public:
  using SolverError::SolverError;
  const char* category() const noexcept override { return "optim"; }
};

class NumericalError : public SolverError {
 public:
  using SolverError::SolverError;
  const char* category() const noexcept override { return "numerical"; }
};

class InversionError : public SolverError {
 public:
  using SolverError::SolverError;
  const char* category() const noexcept override { return "inversion"; }
};

}  // namespace resetfpt
