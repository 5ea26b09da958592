#pragma once

#include <stdexcept>
#include <string>

namespace cyto {

/// Broad category of a failure; used for the machine-readable error record
/// written by the command line tool.
enum class ErrorKind {
  InvalidConfig,
  DimensionMismatch,
  ZeroPivot,
  SingularMatrix,
  NonFinite,
  NotConverged,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by ILU when a pivot vanishes; carries the offending row.
class ZeroPivotError : public Error {
 public:
  ZeroPivotError(std::size_t row, const std::string& what)
      : Error(ErrorKind::ZeroPivot, what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace cyto
