#pragma once

#include <stdexcept>
#include <string>

namespace dpsim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A request exceeds exact-integer width or the configured memory budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Input matrix does not have the sparsity pattern a specialised formula needs.
class StructureViolation : public Error {
 public:
  using Error::Error;
};

/// Closed form requested outside the cases it was derived for.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

class NumericRangeError : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach the requested tolerance.
class AccuracyFailure : public Error {
 public:
  AccuracyFailure(const std::string& what, double achieved)
      : Error(what + " (achieved relative error " + std::to_string(achieved) + ")"),
        achieved_error(achieved) {}
  double achieved_error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpsim
