#ifndef DEEPCLIFE_ERROR_HPP_
#define DEEPCLIFE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace deepclife {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV rows, lifetimes, labels).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A computation could not produce a finite or meaningful result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration key, value or argument combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace deepclife

#endif  // DEEPCLIFE_ERROR_HPP_
