#pragma once

#include <stdexcept>
#include <string>

namespace specfic {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with arguments violating its preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A focus transform H is undefined at the evaluated point (zero variance,
/// infeasible covariance, ...). The message names the offending component.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical degeneracy: vanishing spectral density, singular covariance.
class NumericDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Input data unusable for estimation (e.g. a constant series).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// The plug-in information matrix is numerically singular.
class SingularInformationError : public Error {
 public:
  using Error::Error;
};

/// A diagnostic (such as the under-model Z statistic) is unavailable
/// because its denominator is nonpositive. Reported, never fatal.
class DiagnosticUnavailableError : public Error {
 public:
  using Error::Error;
};

/// A trend design matrix is rank deficient or otherwise unusable.
class DesignError : public Error {
 public:
  using Error::Error;
};

/// A data file could not be parsed; the message names the offending row.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A run configuration is invalid (unknown key, missing field, bad value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace specfic
