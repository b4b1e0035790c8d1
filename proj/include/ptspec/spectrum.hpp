#pragma once

#include <string>
#include <vector>

// Common result types shared by the two exact eigenvalue solvers.

namespace ptspec {

struct EnergyLevel {
  int n = 0;
  double energy = 0.0;
  // Shooting: |Wronskian mismatch| at the root. Reflection: min |r(E)|.
  double residual = 0.0;
  // Energy shift observed in the built-in convergence recheck (cutoff doubled
  // for shooting, L doubled for reflection).
  double recheck_shift = 0.0;
  std::string method;
};

struct LevelFailure {
  int n = -1;  // -1 when not attributable to a single level
  std::string message;
};

struct SpectrumOutcome {
  std::vector<EnergyLevel> levels;
  std::vector<LevelFailure> failures;
};

}  // namespace ptspec
