#pragma once

#include <stdexcept>
#include <string>

namespace zdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (non-finite entries, bad dimensions, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Input is well formed but outside what the analysis supports (e.g. singular A).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A numerical decision could not be made at the requested tolerance.
class Inconclusive : public Error {
 public:
  using Error::Error;
};

/// Not enough usable samples to estimate a quantity.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition was violated (e.g. Nash conditions fail).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace zdyn
