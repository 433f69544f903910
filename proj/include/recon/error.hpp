#pragma once

#include <stdexcept>
#include <string>

namespace recon {

/// Coarse classification used by the CLI and the HTTP service to map
/// failures onto exit codes and status codes.
enum class ErrorKind {
  validation,  // bad input: parse errors, tree property, bad target merger
  usage,       // an operation was called outside its precondition
  bound,       // an enumeration guard refused to run
  aborted,     // interactive resolution was abandoned
  protocol,    // a decision callback answered outside the presented conflict
  internal,    // an algebraic invariant failed; indicates a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class BoundExceeded : public Error {
 public:
  BoundExceeded(const std::string& what, double estimate)
      : Error(ErrorKind::bound, what), estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

class ResolutionAborted : public Error {
 public:
  explicit ResolutionAborted(const std::string& what)
      : Error(ErrorKind::aborted, what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorKind::protocol, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what)
      : Error(ErrorKind::internal, what) {}
};

}  // namespace recon
