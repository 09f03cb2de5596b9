#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmcdist {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A model or argument violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

/// An exponential enumeration would exceed its caller-supplied size guard.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

/// The observation stream ended before the monitor could decide.
class TruncatedStream : public Error {
 public:
  TruncatedStream(std::size_t consumed, std::size_t required)
      : Error("stream ended after " + std::to_string(consumed) + " observations, " +
              std::to_string(required) + " required"),
        consumed_(consumed) {}
  std::size_t consumed() const noexcept { return consumed_; }

 private:
  std::size_t consumed_;
};

/// An operation's documented precondition does not hold (e.g. c <= 0).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace hmcdist
