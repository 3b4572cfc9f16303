#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace egoflux {

enum class ErrorKind {
  invalid_argument,
  not_found,
  data,
  non_convergence,
  conflict,
  unprocessable,
};

/// Base of every error raised by the library. `kind()` drives CLI exit
/// codes and HTTP status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorKind::invalid_argument, message) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message)
      : Error(ErrorKind::not_found, message) {}
};

/// Malformed or inconsistent input data. `line()` is 1-based, 0 when the
/// error is not tied to a line.
class DataError : public Error {
 public:
  DataError(const std::string& message, std::size_t line = 0)
      : Error(ErrorKind::data, message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(double residual, int iterations)
      : Error(ErrorKind::non_convergence,
              "power iteration did not converge after " +
                  std::to_string(iterations) +
                  " iterations (residual " + std::to_string(residual) + ")"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Stale version on an optimistic-concurrency write.
class Conflict : public Error {
 public:
  explicit Conflict(const std::string& message)
      : Error(ErrorKind::conflict, message) {}
};

/// Request is well formed but cannot be acted on (e.g. compiling an empty
/// collection).
class Unprocessable : public Error {
 public:
  explicit Unprocessable(const std::string& message)
      : Error(ErrorKind::unprocessable, message) {}
};

}  // namespace egoflux
