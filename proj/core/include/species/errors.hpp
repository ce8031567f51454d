#pragma once

#include <stdexcept>
#include <string>

namespace species {

/// Syntax error with 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& what)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

/// A mathematically invalid request: ill-formed composition, divergent
/// iteration, singular solve, ... The code string is stable and is what the
/// CLI prints (e.g. "CompositionUndefined", "NonConvergence").
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace species
