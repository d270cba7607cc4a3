#pragma once

#include <stdexcept>
#include <string>

namespace autdrift {

// Root of every error the library raises. The CLI maps the subclasses onto
// exit codes (input → 2, resource → 3, invariant → 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad symbol, bad range, bad literal, unresolved name.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line, int column)
      : InputError(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }
  int line_;
  int column_;
};

// An enumeration or table would exceed its configured cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// make_pair on identical points.
class NotAPairError : public InputError {
 public:
  using InputError::InputError;
};

// make_pair on points whose left tails differ infinitely often.
class NotAsymptoticError : public InputError {
 public:
  using InputError::InputError;
};

// A runtime check derived from a structural guarantee failed, e.g. the
// bounded scan for M found no difference (the automorphism pair is invalid).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// A CA family produced something it promised not to.
class FamilyError : public Error {
 public:
  using Error::Error;
};

// The theorem pipeline's preconditions (infinite, zero entropy) are not met.
class GuardRefusal : public Error {
 public:
  using Error::Error;
};

}  // namespace autdrift
