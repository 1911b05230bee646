#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oblicalc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sort or arity mismatch when building terms, actions or situations.
class SortError : public Error {
 public:
  using Error::Error;
};

/// A query could not be answered (unbounded formula, undeclared symbol, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a monitor/classifier operation was not met.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The oracle's enumeration would exceed its combinatorial cap.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

struct SourceLoc {
  std::size_t line = 0;
  std::size_t column = 0;
};

/// One finding about a theory file, printed as `file:line:col: code: message`.
struct Diagnostic {
  SourceLoc loc;
  std::string code;
  std::string message;

  std::string format(const std::string& file) const {
    return file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + code +
           ": " + message;
  }
};

}  // namespace oblicalc
