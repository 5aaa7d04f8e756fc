#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bergerdeck {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input supplied by the caller (grid sizes, physical parameters, config
/// values). The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class SizingError : public InputError {
 public:
  using InputError::InputError;
};

class ParameterError : public InputError {
 public:
  using InputError::InputError;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedLawError : public InputError {
 public:
  using InputError::InputError;
};

/// Failures while computing (solver, iteration, I/O). The CLI maps these to
/// exit code 2.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

class SolveError : public RuntimeFailure {
 public:
  SolveError(const std::string& what, double residual)
      : RuntimeFailure(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConvergenceError : public RuntimeFailure {
 public:
  ConvergenceError(const std::string& what, double last_ratio)
      : RuntimeFailure(what), last_ratio_(last_ratio) {}
  double last_ratio() const noexcept { return last_ratio_; }

 private:
  double last_ratio_;
};

class NonFiniteError : public RuntimeFailure {
 public:
  explicit NonFiniteError(long step)
      : RuntimeFailure("non-finite state at step " + std::to_string(step)), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class SequencingError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class FitError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class PlotError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

class IoError : public RuntimeFailure {
 public:
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace bergerdeck
