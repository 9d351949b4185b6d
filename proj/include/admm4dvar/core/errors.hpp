#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace admm4dvar {

/// A direct solver met a (numerically) zero pivot.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver ran out of its iteration budget.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double achieved_residual)
      : std::runtime_error(what + " (residual " + std::to_string(achieved_residual) + ")"),
        residual_(achieved_residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Invalid model or problem configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A descent line search could not find sufficient decrease.
class LineSearchStall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, written or parsed.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path) : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace admm4dvar
