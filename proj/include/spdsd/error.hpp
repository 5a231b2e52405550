#pragma once

#include <stdexcept>
#include <string>

namespace spdsd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class SingularFactor : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// A matrix function was asked for outside its domain (e.g. log of a
/// matrix with a non-positive eigenvalue).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An exponent exceeded the double-precision safe range.
class Overflow : public Error {
 public:
  using Error::Error;
};

class OverlappingDirections : public Error {
 public:
  using Error::Error;
};

class StructureViolation : public Error {
 public:
  using Error::Error;
};

class NoClosedForm : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spdsd
