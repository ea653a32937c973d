#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace crslip {

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneratePoint : public Error {
 public:
  using Error::Error;
};

class NotOnBoundary : public Error {
 public:
  using Error::Error;
};

class RegularityViolation : public Error {
 public:
  using Error::Error;
};

class NonManifold : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class PointOutsideCell : public Error {
 public:
  using Error::Error;
};

class SolveFailure : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public SolveFailure {
 public:
  using SolveFailure::SolveFailure;
};

class FactorizationFailure : public SolveFailure {
 public:
  using SolveFailure::SolveFailure;
};

class SingularGram : public Error {
 public:
  using Error::Error;
};

class OracleMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by the study driver; wraps the original message with the stage
/// (refine, assemble, solve, measure) and level at which it occurred.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, int level, const std::string& what)
      : Error(stage + " failed at level " + std::to_string(level) + ": " + what),
        stage_(std::move(stage)),
        level_(level) {}
  const std::string& stage() const noexcept { return stage_; }
  int level() const noexcept { return level_; }

 private:
  std::string stage_;
  int level_;
};

}  // namespace crslip
