#pragma once

#include <stdexcept>
#include <string>

namespace nhimp {

/// Base class of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters or a violated precondition. The CLI maps it to exit code 1.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not deliver its contract (singular eigenvector
/// basis, quadrature not converged, ambiguous filling). Carries the name of the
/// failing operation; the CLI maps it to exit code 2.
class NumericalError : public Error {
 public:
  NumericalError(std::string operation, const std::string& what)
      : Error(operation + ": " + what), operation_(std::move(operation)) {}

  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string operation_;
};

}  // namespace nhimp
