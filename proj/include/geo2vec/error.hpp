#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geo2vec {

// Base for all library failures. The CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or degenerate geometry (e.g. a ring with zero area, a zero-extent shape).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. offset is the byte position where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Dataset-level inconsistencies: duplicate ids, missing labels, id mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

// Divergence during optimization (non-finite loss or parameters).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Binary file format problems: bad magic, truncation, wrong mode.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace geo2vec
