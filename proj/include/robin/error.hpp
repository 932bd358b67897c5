#pragma once

#include <stdexcept>
#include <string>

namespace robin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A mesh or domain whose geometry cannot be discretised (zero-length fiber, sliver triangle).
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class UnknownTag : public Error {
 public:
  using Error::Error;
};

class EmptyInterior : public Error {
 public:
  using Error::Error;
};

class NoRoot : public Error {
 public:
  using Error::Error;
};

/// Raised by the eigensolver; callers map these to a solver-failure exit status.
class SolverError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public SolverError {
 public:
  using SolverError::SolverError;
};

class MaxIterations : public SolverError {
 public:
  using SolverError::SolverError;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace robin
