#pragma once

#include <stdexcept>
#include <string>

namespace ovsim {

/// Configuration text could not be parsed or violates a scene invariant.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// The scene cannot be discretized (bad resolution, memory cap, path outside crystal).
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear solve failed to converge or the system is singular.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ovsim
