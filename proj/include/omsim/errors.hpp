#pragma once

#include <stdexcept>
#include <string>

namespace omsim {

// All failures surface as one of these so callers (sweep engine, CLI) can
// map them to cell status / exit codes without string matching.

struct InvalidParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Trajectory blew past the overflow guard: parametric (or optomechanical)
// instability.
struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Settle cap reached without stroboscopic closure, or an iterative solve
// failed to converge.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Harmonic-balance linear system singular (resonant undamped case).
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Covariance matrix handed to a metric is not a physical Gaussian state.
struct UnphysicalInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace omsim
