#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qgf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Qubit counts or matrix shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Index or parameter outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text; carries the 1-based line number (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A register carries weight outside the electron-number sector it was routed to.
class SectorLeakError : public Error {
 public:
  using Error::Error;
};

/// A requested computation exceeds the configured memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point too close to a pole of G (or G(z) numerically singular).
class PoleProximityError : public Error {
 public:
  using Error::Error;
};

/// Integration contour passes too close to a pole.
class ContourError : public Error {
 public:
  using Error::Error;
};

}  // namespace qgf
