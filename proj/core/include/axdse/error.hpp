#pragma once

#include <stdexcept>
#include <string>

namespace axdse {

// Base class for all recoverable toolkit errors: malformed input files,
// violated preconditions, inconsistent data. The CLI maps these to exit
// code 2; anything else that escapes is an internal error (exit 3).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Syntax error in a text input, with 1-based source position.
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

}  // namespace axdse
