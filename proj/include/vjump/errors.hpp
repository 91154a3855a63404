#pragma once

#include <stdexcept>
#include <string>

namespace vjump {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed input: a config field, an index out of range, a bad shape.
/// `path` names the offending config field when one is known.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& message, std::string path = {})
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const char* kind() const noexcept override { return "validation"; }
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// Well-formed input that violates a mathematical hypothesis
/// (reducible rates, nonzero drift, asymmetric rates where symmetry is needed).
class PreconditionError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

/// A numerical guard tripped: branch crossing, wrap-around on the periodic box,
/// or a combinatorial size cap.
class NumericalGuardError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical_guard"; }
};

}  // namespace vjump
