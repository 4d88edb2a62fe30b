#pragma once

#include <stdexcept>
#include <string>

namespace actsub {

/// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (bad shapes, non-finite values, n out of range).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The data do not determine the requested object (all-zero gradients, zero eigenvalue
/// on an active direction).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// Factorization breakdown, infeasible linear program, overflow.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A combination the library intentionally does not handle (zonotopes with n >= 3).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Bad configuration file or CLI arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace actsub
