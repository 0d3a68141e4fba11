#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace collage {

// Base of every error the library throws. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based; 0 when not line oriented.
class ParseError : public Error {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// A record names a recording (or key) that does not exist.
class ReferenceError : public Error {
public:
  using Error::Error;
};

// Well-formed input that breaks a data invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// No implicit resampling anywhere: differing rates are fatal.
class RateMismatchError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class LookupError : public Error {
public:
  using Error::Error;
};

// RMS below the silence guard; energy normalization is undefined.
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

class UsageError : public Error {
public:
  using Error::Error;
};

}  // namespace collage
