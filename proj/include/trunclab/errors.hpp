#pragma once

#include <stdexcept>
#include <string>

namespace trunclab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad widths, k out of range, malformed configs
struct ParameterError : Error {
  using Error::Error;
};

// value does not fit the declared precision band
struct RangeError : Error {
  using Error::Error;
};

struct PrecisionError : Error {
  using Error::Error;
};

// mixing elements of different rings or fields
struct SpecMismatch : Error {
  using Error::Error;
};

// precondition violated (only raised in verify mode)
struct ContractError : Error {
  using Error::Error;
};

struct TransportError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace trunclab
