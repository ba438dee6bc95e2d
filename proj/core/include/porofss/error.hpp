#pragma once

#include <stdexcept>
#include <string>

namespace porofss {

/// Base class for all porofss failures.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent user input (config file, material data, grid spec).
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A linear or nonlinear solve failed to reach its tolerance.
class SolverError : public Error {
public:
  explicit SolverError(const std::string& what) : Error(what) {}
};

} // namespace porofss
