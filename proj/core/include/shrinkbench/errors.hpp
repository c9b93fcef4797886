#pragma once

#include <stdexcept>
#include <string>

namespace shrinkbench {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A violated precondition or invariant on an in-memory value.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable input data (files, CSV content, date alignment).
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad command line or config file usage.
class UsageError : public Error {
 public:
  using Error::Error;
};

// An OLS solve hit a singular system while ridge_lambda == 0.
class RankDeficientError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace shrinkbench
