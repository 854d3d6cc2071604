#pragma once

#include <stdexcept>

namespace anncalc {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adjacent layer shapes do not chain, or a bias length disagrees with its
// weight matrix row count.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

// A network needs at least one layer.
class EmptyNetworkError : public Error {
 public:
  using Error::Error;
};

// Every layer must have at least one row and one column.
class ZeroWidthLayerError : public Error {
 public:
  using Error::Error;
};

// An input/output dimension does not match what an operation requires.
class DimMismatchError : public Error {
 public:
  using Error::Error;
};

// The requested construction needs an activation with an exact identity
// network (rectifier or leaky rectifier); opaque activations have none.
class UnsupportedActivationError : public Error {
 public:
  using Error::Error;
};

// Serialized document is not valid JSON.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Document parsed but violates the network schema.
class SchemaViolationError : public Error {
 public:
  using Error::Error;
};

// pad_depth target below the current depth.
class TargetTooSmallError : public Error {
 public:
  using Error::Error;
};

// Euler-step construction requires input dim == output dim.
class NotEndomorphicError : public Error {
 public:
  using Error::Error;
};

// compose_chain needs at least one factor.
class EmptyChainError : public Error {
 public:
  using Error::Error;
};

// Composition combinator is missing a Lipschitz constant for a factor.
class MissingLipschitzError : public Error {
 public:
  using Error::Error;
};

// Limit combinator requires a strictly positive rate R.
class NonpositiveRError : public Error {
 public:
  using Error::Error;
};

// Reference integrator exceeded its step cap before reaching the tolerance.
class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

// Step-count selection exceeded the configured cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// A measured Euler error exceeded the a-priori bound (implementation bug or a
// wrong declared Lipschitz constant).
class BoundViolatedError : public Error {
 public:
  using Error::Error;
};

// Scaling fit attempted on a table without enough distinct values per axis.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace anncalc
