#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsnmf {

// Precondition violated by the caller (bad index, shape mismatch, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input file. Line and column are 1-based; 0 means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Covariance with no usable spectrum (e.g. every signal constant).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dictionary column that is (or collapsed to) all zeros.
class DegenerateAtomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsnmf
