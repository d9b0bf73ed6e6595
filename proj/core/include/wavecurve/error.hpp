#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wavecurve {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the support of a basis.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands defined on incompatible grids or with mismatched dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument values (NaN, empty collections, negative counts, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Linear system is singular or rank deficient.
class RankError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver exhausted its budget. Carries the last diagnostic value
/// (duality gap for the scalar solver, relative objective change for fgen).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double diagnostic)
      : Error(what), diagnostic_(diagnostic) {}
  double diagnostic() const noexcept { return diagnostic_; }

 private:
  double diagnostic_;
};

/// A keyed join found keys on one side that are absent on the other.
class KeyedJoinError : public Error {
 public:
  KeyedJoinError(const std::string& context, std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

/// Input file failed validation. Row is 1-based including the header line;
/// column is the header name (empty when the whole row is at fault).
class ValidationError : public Error {
 public:
  ValidationError(std::string file, std::size_t row, std::string column, const std::string& message);
  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t row_;
  std::string column_;
};

}  // namespace wavecurve
