#pragma once

#include <stdexcept>
#include <string>

namespace nullgeo {

// Base for every error the library raises. Callers that only care about
// "something was wrong with my request" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: non-square matrices, NaNs, bad indices, parse failures.
class InputError : public Error {
 public:
  using Error::Error;
};

// Input text that does not follow the file grammar; the message starts with
// the location (file:line or file:line:column).
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// A numeric parameter outside its admissible range (eps <= 0, s out of range).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Side lengths that cannot be realized in the requested model plane.
class ModelConstraintError : public Error {
 public:
  using Error::Error;
};

// Comparison angle requested at a vertex with a zero-length adjacent side.
class UndefinedAngleError : public ModelConstraintError {
 public:
  using ModelConstraintError::ModelConstraintError;
};

// c < a + b for a would-be timelike triangle.
class ReverseTriangleError : public ModelConstraintError {
 public:
  using ModelConstraintError::ModelConstraintError;
};

// Exhaustive algorithm refused because the instance is too large.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Request outside the supported regime (chart limits, non-product warping).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation does not hold on the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An iterative construction could not complete (e.g. too many re-splits).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

}  // namespace nullgeo
