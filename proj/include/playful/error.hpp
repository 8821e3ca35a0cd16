#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace playful {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document or pattern. `line` is 1-based (0 when not
// applicable), `column` is a 0-based offset into the offending text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0 && column == 0) return what;
    std::string out = what + " (";
    if (line != 0) out += "line " + std::to_string(line) + (column != 0 ? ", " : "");
    if (column != 0 || line == 0) out += "column " + std::to_string(column);
    return out + ")";
  }

  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that violates a semantic invariant (cycles, unknown ids...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Caller broke an interface contract (mismatched provider, bad argument).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Network failure talking to an external service; safe to retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// State-machine conflict: double claim, busy session, closed session.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// Deadline or duration budget already passed.
class ExpiredError : public Error {
 public:
  using Error::Error;
};

}  // namespace playful
