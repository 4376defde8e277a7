#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dc2v {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed corpus input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Invalid configuration or operation arguments.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Unreadable, truncated or corrupted model file.
class FormatError : public Error {
public:
  using Error::Error;
};

/// A query had no token the model knows about.
class UnknownTokensError : public Error {
public:
  explicit UnknownTokensError(std::size_t unknown)
      : Error("no known tokens in query (" + std::to_string(unknown) +
              " unknown)"),
        unknown_(unknown) {}
  std::size_t unknown_count() const noexcept { return unknown_; }

private:
  std::size_t unknown_;
};

}  // namespace dc2v
