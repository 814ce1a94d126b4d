#pragma once

#include <stdexcept>
#include <string>

namespace cuckoowalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: degenerate sizes, out-of-range parameters, duplicate inserts.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured work budget would be (or was) exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Not enough samples to produce the requested statistic.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// An iterative computation failed to make progress.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace cuckoowalk
