#pragma once

#include <stdexcept>
#include <string>

namespace srlab {

// Base class of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A function or operation was evaluated outside its domain
// (log of a non-positive value, jet order beyond the supported maximum, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid user input: malformed model/check specs, inconsistent parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterative method did not reach its stopping criterion.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A configured resource cap (grid cells, paths) would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace srlab
