#pragma once

#include <stdexcept>
#include <string>

namespace tdlr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration / input problems (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// The converged state is not a non-degenerate minimum (CLI exit code 3).
struct NotAMinimumError : Error {
  using Error::Error;
};

// Numerical failures (CLI exit code 4).
struct NumericalError : Error {
  using Error::Error;
};

struct MaxIterationsError : NumericalError {
  using NumericalError::NumericalError;
};
struct PositiveOccupiedEigenvalueError : NumericalError {
  using NumericalError::NumericalError;
};
struct StepTooLargeError : NumericalError {
  using NumericalError::NumericalError;
};
struct NonfiniteStateError : NumericalError {
  using NumericalError::NumericalError;
};
struct NotPerpError : NumericalError {
  using NumericalError::NumericalError;
};
struct NoConvergenceError : NumericalError {
  using NumericalError::NumericalError;
};
struct ChannelInvalidError : NumericalError {
  using NumericalError::NumericalError;
};
struct SmoothingTooNarrowError : NumericalError {
  using NumericalError::NumericalError;
};
struct SingularSystemError : NumericalError {
  using NumericalError::NumericalError;
};
struct ShapeError : NumericalError {
  using NumericalError::NumericalError;
};
struct InvalidDensityError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace tdlr
