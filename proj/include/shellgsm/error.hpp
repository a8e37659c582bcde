#pragma once

#include <stdexcept>
#include <string>

namespace shellgsm {

enum class ErrorCode {
  invalid_argument = 1,
  domain,
  degenerate,
  numeric,
  parse,
  io,
  dimension,
  validation,
};

/// Base of every exception thrown by the library. The code survives the
/// trip through the C API unchanged.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

/// Resonance-degenerate input, e.g. psi_l(kb*rb) == 0 for some degree.
class DegenerateError : public Error {
public:
  DegenerateError(const std::string& what, int degree)
      : Error(ErrorCode::degenerate, what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

private:
  int degree_;
};

class NumericError : public Error {
public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(ErrorCode::parse, what), line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& what) : Error(ErrorCode::dimension, what) {}
};

}  // namespace shellgsm
