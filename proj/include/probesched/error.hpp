#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace probesched {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Every weight W_i vanished: no set with positive weight constrains the schedule.
class DegenerateProcessError : public Error {
 public:
  DegenerateProcessError() : Error("degenerate process: all weights are zero") {}
};

class NumericalError : public Error {
 public:
  NumericalError(std::size_t iteration, const std::string& what)
      : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace probesched
