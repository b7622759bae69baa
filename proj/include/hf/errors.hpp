#pragma once

#include <stdexcept>
#include <string>

namespace hf {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a construction would exceed a configured size budget
// (stage cap, powerset budget, subset-family cap, ...). Never silent.
struct CapacityError : Error {
  using Error::Error;
};

// Raised on malformed textual input; carries 1-based line/column.
struct ParseError : Error {
  int line, column;
  ParseError(const std::string& msg, int line_, int column_)
      : Error("parse error at " + std::to_string(line_) + ":" +
              std::to_string(column_) + ": " + msg),
        line(line_), column(column_) {}
};

// Raised when an operation's stated precondition fails (non-transitive
// encode input, ill-founded collapse input, unbound variable, ...).
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace hf
