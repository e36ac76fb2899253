#pragma once

#include <stdexcept>
#include <string>

namespace isingimpute {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: malformed files, inconsistent dimensions, invalid config.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Cholesky factorization hit a non-positive pivot; carries the pivot index.
class SpdError : public Error {
 public:
  SpdError(const std::string& what, int pivot_index)
      : Error(what), pivot_index_(pivot_index) {}
  int pivot_index() const { return pivot_index_; }

 private:
  int pivot_index_;
};

// Listwise deletion removed every row.
class EmptyCompleteCaseError : public Error {
 public:
  explicit EmptyCompleteCaseError(const std::string& what) : Error(what) {}
};

}  // namespace isingimpute
