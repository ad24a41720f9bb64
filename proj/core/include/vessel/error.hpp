#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vessel {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input: grid/study files, dangling ids, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Grid or study text that does not follow the sectioned key-value grammar.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Numerical failure: non-convergence, divergence, failed network solve.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace vessel
