#pragma once

#include <stdexcept>
#include <string>

namespace ptd {

// Every failure the library reports derives from Error so callers (the CLI in
// particular) can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input problems: bad dimensions, invalid design parameters, malformed config.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

// Correlation matrix is not a valid (PSD, unit-diagonal) correlation matrix.
class MatrixDomainError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

// Numerical failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class SizingError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace ptd
