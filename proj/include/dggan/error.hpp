#pragma once

#include <stdexcept>
#include <string>

namespace dggan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message carries the file and line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A loss or gradient became NaN or infinite.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace dggan
