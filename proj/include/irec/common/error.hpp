#pragma once

#include <stdexcept>
#include <string>

namespace irec {

// Error categories map onto the CLI exit-code contract:
// ConfigError -> 2, DataError -> 3, TransportError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// Contract violations on numeric inputs (index, dimension, finiteness).
class IndexOutOfRange : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class NonFiniteInput : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace irec
