#ifndef POLYSDE_ERRORS_HPP
#define POLYSDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polysde {

// Bad user input: malformed config, invalid parameter combinations.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Geometric construction failure: empty or unbounded polyhedron, degenerate
// facet normal.
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation requested outside the domain where a field is defined.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric abort during integration. Carries the step at which the state
// became unusable so the offending (seed, sample, step) can be reported.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, long step)
      : std::runtime_error(step >= 0 ? what + " at step " + std::to_string(step) : what),
        step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace polysde

#endif  // POLYSDE_ERRORS_HPP
