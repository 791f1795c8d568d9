#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mathlex {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CONLL-U (or other line-oriented) input. line is 1-based, 0 when
// not attributable to a line.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NormalizationError : public Error {
 public:
  NormalizationError(std::string message, std::string fragment)
      : Error(message + ": " + fragment), fragment_(std::move(fragment)) {}

  const std::string& fragment() const noexcept { return fragment_; }

 private:
  std::string fragment_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class LinkingError : public Error {
 public:
  LinkingError(const std::string& message, bool retryable)
      : Error(message), retryable_(retryable) {}

  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mathlex
