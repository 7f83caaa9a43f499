#pragma once

#include <stdexcept>
#include <string>

namespace sperk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, inconsistent configuration, broken invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Unknown name (tableau, weight label, problem, mask strategy, ...).
class LookupError : public Error {
 public:
  using Error::Error;
};

// Non-finite or exploding state detected during time integration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int step, double time)
      : Error(what), step_index(step), time(time) {}
  int step_index = -1;
  double time = 0.0;
};

// Config-file syntax or schema violation; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("config line " + std::to_string(line) + ": " + what), line(line) {}
  int line = 0;
};

}  // namespace sperk
