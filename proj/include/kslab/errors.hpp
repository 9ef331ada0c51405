#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

// Thrown when an iterative or factorized solve fails to meet its tolerance.
// Carries the residual (or convergence measure) actually achieved.
struct SolverError : std::runtime_error {
  double residual = 0.0;
  SolverError(const std::string& what, double res)
      : std::runtime_error(what + " (achieved " + std::to_string(res) + ")"),
        residual(res) {}
};

}  // namespace kslab
