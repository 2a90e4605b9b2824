#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rweld {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid sizes, grids or parameter combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A call-site argument outside the documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or degenerate numerical state.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve did not reach tolerance; carries the history of
/// successive-difference norms so callers can inspect the stall.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace rweld
