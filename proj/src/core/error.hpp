#pragma once

#include <stdexcept>
#include <string>

namespace symctl {

enum class ErrorKind {
  Dimension,
  EmptyInput,
  CannotBisect,
  Syntax,
  UnknownIdentifier,
  NonIntegerExponent,
  Domain,
  InvalidOverlay,
  InvalidArgument,
  Parameter,
  Unsupported,
  UndefinedController,
  Io,
  Internal,
};

const char* to_string(ErrorKind kind) noexcept;

/* Base exception of the toolkit; the C API maps `kind()` onto status codes. */
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/* Parse errors carry a 1-based source position. */
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : Error(ErrorKind::Syntax,
              msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace symctl
