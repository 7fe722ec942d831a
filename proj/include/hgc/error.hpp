#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hgc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch or an index/size outside its admissible range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A calculator argument outside the domain on which the formula is stated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Orthogonality loss or a degenerate coupling.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Gram–Schmidt hit a residual below the degeneracy threshold.
class DegeneracyError : public NumericalError {
 public:
  DegeneracyError(std::size_t column, double residual, double threshold)
      : NumericalError("degenerate column " + std::to_string(column) +
                       ": residual norm " + std::to_string(residual) +
                       " below threshold " + std::to_string(threshold)),
        column_(column) {}

  /// 1-based index of the offending column.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace hgc
