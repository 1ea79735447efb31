#ifndef PRVA_ERRORS_HPP
#define PRVA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prva {

// Broad failure classes; the CLI maps these onto exit codes.
enum class ErrorKind {
  usage,       // malformed request (bad target spec, unknown command)
  data,        // invalid data or parameters (domain, parse, validation)
  internal,    // broken invariant inside the library
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// A value violated a type invariant (e.g. mixture weights not summing to 1).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

/// Zero-spread data where a positive spread is required.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

/// Failure while reading a text file; carries the 1-based line number (0 when
/// the failure is not tied to a line, e.g. an empty file).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorKind::data, source + (line ? ":" + std::to_string(line) : std::string{}) +
                                   ": " + what),
        source_(source),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// A trace-backed stream ran out of samples.
class StreamUnderrun : public Error {
 public:
  explicit StreamUnderrun(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// The requested operation is not available for this distribution variant.
class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Accept-reject envelope broken (f > c g observed) or acceptance starved.
class DominanceError : public Error {
 public:
  explicit DominanceError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class CatalogError : public Error {
 public:
  explicit CatalogError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

}  // namespace prva

#endif  // PRVA_ERRORS_HPP
