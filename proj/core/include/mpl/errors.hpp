#pragma once

#include <stdexcept>
#include <string>

namespace mpl {

// Base for everything this library throws on bad input. Internal logic bugs
// use assertions instead.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Lexical or grammatical problem in mechanism / predicate source text.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " (line " + std::to_string(line) + ", col " +
              std::to_string(col) + ")"),
        line_(line), col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

// Structurally well-formed input that fails interpretation-level checks:
// unknown sorts, partial function tables, invalid preferences, and so on.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Raised during evaluation when a value falls outside its sort and no
// saturation rule applies (non-integer sorts have no nearest element).
class EvalError : public Error {
public:
  explicit EvalError(const std::string& msg) : Error(msg) {}
};

// A query needed an exact answer but only a capped (inexact) one exists.
class InexactError : public Error {
public:
  explicit InexactError(const std::string& msg) : Error(msg) {}
};

}  // namespace mpl
