#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gdl {

// Base type for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// A column that must be normalized has (numerically) zero norm.
struct ZeroColumn : Error {
  explicit ZeroColumn(std::size_t col)
      : Error("zero-norm column " + std::to_string(col)), column(col) {}
  std::size_t column;
};

struct NonUnitDictionary : Error {
  using Error::Error;
};

// Brute-force enumeration would exceed the documented cap.
struct TooLarge : Error {
  using Error::Error;
};

struct ZeroMatrix : Error {
  using Error::Error;
};

struct DegenerateDirection : Error {
  using Error::Error;
};

struct BudgetTooLarge : Error {
  using Error::Error;
};

struct SingularGram : Error {
  using Error::Error;
};

struct InvalidDims : Error {
  using Error::Error;
};

struct EmptyDictionary : Error {
  using Error::Error;
};

struct UncoveredPixel : Error {
  using Error::Error;
};

struct ImageTooSmall : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

// A file could not be opened or written.
struct IoError : Error {
  using Error::Error;
};

struct UnsupportedFormat : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

// Precondition violations that have no more specific type above.
struct InvalidArgument : Error {
  using Error::Error;
};

}  // namespace gdl
