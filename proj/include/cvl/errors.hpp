#pragma once

#include <stdexcept>
#include <string>

namespace cvl {

// Base of every error raised by the library. Callers that only care about
// "something was invalid" catch this; tests match the concrete subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A type invariant (normalization, orthonormality, probability vector, ...)
// failed on construction or load.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

// |<phi|psi>| (or Tr{Pi rho}) fell below the overlap cutoff.
class VanishingOverlap : public Error {
 public:
  using Error::Error;
};

// The quotient and bracket routes to a weak value disagreed.
class NumericalDisagreement : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

// Fields or samples built from different (state, basis) pairs were combined.
class ProvenanceMismatch : public Error {
 public:
  using Error::Error;
};

// A pointwise quantity was requested at a masked index or grid point.
class MaskedEntry : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace cvl
