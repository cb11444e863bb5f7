#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sensas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem definition whose blocks disagree in shape or symmetry.
class ShapeError : public Error {
 public:
  ShapeError(std::string field, const std::string& what)
      : Error("invalid field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised by the LU factorization when a pivot falls below the relative threshold.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::ptrdiff_t pivot_index, double pivot_magnitude, const std::string& context = {});
  /// 0-based elimination step at which the pivot failed.
  std::ptrdiff_t pivot_index() const noexcept { return pivot_index_; }
  double pivot_magnitude() const noexcept { return pivot_magnitude_; }

 private:
  std::ptrdiff_t pivot_index_;
  double pivot_magnitude_;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Problem-file syntax or content error; line and column are 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace sensas
