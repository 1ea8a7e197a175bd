#pragma once

#include <stdexcept>
#include <string>

namespace rdnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A search or LP exceeded its hard size limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdnet
