#pragma once

#include <stdexcept>
#include <string>

namespace rcs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape disagreement between operands (empty inputs included).
struct DimensionError : Error {
  using Error::Error;
};

/// A scalar argument outside its documented range.
struct ParameterError : Error {
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

/// Non-finite values appeared inside an iteration.
struct NumericalError : Error {
  using Error::Error;
};

/// OMP active-set least squares became singular.
struct DictionaryError : Error {
  using Error::Error;
};

/// Monte Carlo harness failure (e.g. too many failed trials).
struct HarnessError : Error {
  using Error::Error;
};

}  // namespace rcs
