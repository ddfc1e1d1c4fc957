#pragma once

#include <stdexcept>
#include <string>

namespace ecoepi {

// Invalid or ill-formed user input (config files, parameter blocks).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical routine failed to converge or was asked to solve a
// singular/ill-posed problem.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Time integration produced a negative density. The scheme preserves
// positivity for admissible time steps, so this signals dt too large.
struct PositivityError : std::runtime_error {
  PositivityError(const std::string& msg, double when, double worst)
      : std::runtime_error(msg), t(when), min_value(worst) {}
  double t;
  double min_value;
};

}  // namespace ecoepi
