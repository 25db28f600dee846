#pragma once

#include <stdexcept>
#include <string>

namespace sbm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong sizes, non-finite coordinates, bad parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A point violates the geometric precondition of an operation
/// (e.g. asking for the normal at an interior point).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical geometry failed (projection out of reach, no interior curve).
class GeometryError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A structured object (driver, config) failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A linear program was infeasible; `what()` names the unreachable target.
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// NaN/overflow during time stepping.
class NumericError : public Error {
 public:
  NumericError(const std::string& msg, long long step) : Error(msg), step_(step) {}
  long long step() const noexcept { return step_; }

 private:
  long long step_;
};

}  // namespace sbm
