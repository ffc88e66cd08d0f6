#pragma once

#include <stdexcept>
#include <string>

namespace aftsdar {

/// Malformed or inconsistent user input (bad CSV cell, length mismatch,
/// invalid configuration value). CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical degeneracy that makes the requested computation ill-posed
/// (all design columns dropped, over-determined support, degenerate CV
/// fold, censoring calibration failure). CLI exit code 3.
class DegeneracyError : public std::runtime_error {
 public:
  explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Brute-force theory diagnostics requested on a problem too large to
/// enumerate. CLI exit code 4.
class DiagnosticsInfeasibleError : public std::runtime_error {
 public:
  explicit DiagnosticsInfeasibleError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace aftsdar
