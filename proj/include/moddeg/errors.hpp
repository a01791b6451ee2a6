#pragma once

#include <stdexcept>
#include <string>

namespace moddeg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A subset violates the stability bound |S|, |S^c| >= 2.
class StabilityError : public Error {
 public:
  using Error::Error;
};

// (n, k) outside the range the pipeline supports.
class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

// Malformed textual input (cycle notation, polynomial lists, fixtures).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A class that should lie in the span of a basis does not; always a bug
// in relation generation, never a valid-input condition.
class InconsistentClass : public Error {
 public:
  using Error::Error;
};

// The monic characteristic polynomial came out with non-integer
// coefficients; signals a basis or reduction bug.
class NonIntegralCharPoly : public Error {
 public:
  using Error::Error;
};

// Iterative root extraction failed to settle.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A computation would exceed the configured size/memory ceiling.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A sweep found a dynamical degree that is neither trivial nor listed
// in the reference tables.
class UnmatchedDegree : public Error {
 public:
  using Error::Error;
};

}  // namespace moddeg
