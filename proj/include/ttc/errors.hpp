#pragma once

#include <stdexcept>
#include <string>

namespace ttc {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched shapes, out-of-range indices or modes.
struct ShapeError : Error {
  using Error::Error;
};

// Sparse operands whose supports are not aligned.
struct SupportError : Error {
  using Error::Error;
};

// Malformed input files.
struct ParseError : Error {
  using Error::Error;
};

// Invalid run configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Numerical breakdown: non-finite values, failed iterative solves.
struct NumericalError : Error {
  using Error::Error;
};

// Retraction step that annihilates the point; callers shrink and retry.
struct DegenerateStepError : NumericalError {
  using NumericalError::NumericalError;
};

// Metric undefined for the given inputs (empty data, single-class AUC).
struct MetricError : Error {
  using Error::Error;
};

}  // namespace ttc
