#pragma once

#include <stdexcept>
#include <string>

namespace homog {

// Process exit codes shared by the CLI and the error hierarchy.
enum class ExitCode : int {
  ok = 0,
  config_error = 1,
  hypothesis_violation = 2,
  solver_failure = 3,
  insufficient_data = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode exit_code() const { return code_; }

 private:
  ExitCode code_;
};

// Bad or inconsistent configuration (schema violations, kind mismatches,
// incompatible grids).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::config_error, what) {}
};

// Declared ellipticity / sup-norm bounds violated at a sample point. The
// message names the offending point.
class HypothesisError : public Error {
 public:
  HypothesisError(const std::string& what, double y1, double y2)
      : Error(ExitCode::hypothesis_violation, what), y1_(y1), y2_(y2) {}
  double sample_y1() const { return y1_; }
  double sample_y2() const { return y2_; }

 private:
  double y1_, y2_;
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what)
      : Error(ExitCode::solver_failure, what) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : Error(ExitCode::insufficient_data, what) {}
};

}  // namespace homog
