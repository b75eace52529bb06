#pragma once

#include <stdexcept>
#include <string>

namespace latflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed numeric text or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition (zero vector, empty interval, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A search window, enumeration or sample grid exceeded its configured cap.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Floating conditioning beyond what the available precision can certify.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// The operation has no meaning for this input mode (e.g. a rational
/// certificate for floating inputs).
class NotApplicable : public Error {
 public:
  using Error::Error;
};

}  // namespace latflow
