#pragma once

#include <stdexcept>
#include <string>

namespace slicing {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class GridTooLarge : public Error {
 public:
  using Error::Error;
};

/// Quadrature or LP failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A size cap (atoms, LP columns, memory) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Schedule whose atom count cannot be materialized; use a desk schedule.
class InfeasibleSchedule : public Error {
 public:
  using Error::Error;
};

class DegenerateTruncation : public Error {
 public:
  using Error::Error;
};

class ZeroSection : public Error {
 public:
  using Error::Error;
};

class BracketUnavailable : public Error {
 public:
  using Error::Error;
};

/// Direction at which a singular integrand diverges.
class SingularDirection : public Error {
 public:
  using Error::Error;
};

}  // namespace slicing
