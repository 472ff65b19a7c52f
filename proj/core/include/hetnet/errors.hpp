#pragma once

#include <stdexcept>
#include <string>

namespace hetnet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates its domain. `field()` names the offending parameter.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numerical result could not be certified to the required accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside the region where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetnet
