#pragma once

#include <stdexcept>
#include <string>

namespace erw {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A closed form was requested too close to one of its poles.
class SingularityError : public DomainError {
 public:
  SingularityError(std::string denominator, const std::string& what)
      : DomainError(what), denominator_(std::move(denominator)) {}

  /// Name of the vanishing denominator, e.g. "2*alpha-1".
  const std::string& denominator() const noexcept { return denominator_; }

 private:
  std::string denominator_;
};

/// A limit result was requested outside the superdiffusive regime.
class RegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed step distribution descriptor or parameters.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// Enumeration oracle refused a problem that is too large.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

/// The martingale reconstruction check failed; indicates a bug, not bad input.
class ReconstructionError : public Error {
 public:
  using Error::Error;
};

/// Unusable experiment configuration (CLI layer).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace erw
