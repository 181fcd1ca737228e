#pragma once

#include <stdexcept>
#include <string>

namespace ficfl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Multiset subtraction where the subtrahend is not pointwise below.
struct NotSubsumed : Error {
  using Error::Error;
};

struct UnknownTransition : Error {
  using Error::Error;
};

struct NotRestricted : Error {
  using Error::Error;
};

struct InvalidDerivation : Error {
  using Error::Error;
};

struct UnboundTerminal : Error {
  using Error::Error;
};

struct ImproperCall : Error {
  using Error::Error;
};

struct NotWeak : Error {
  using Error::Error;
};

// Raised by engines whose contract treats budget exhaustion as an error
// rather than a verdict.
struct BudgetExceededError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_, int col_ = 0)
      : Error(msg + " (line " + std::to_string(line_) + ")"),
        line(line_),
        col(col_) {}
};

}  // namespace ficfl
