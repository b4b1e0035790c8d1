#pragma once

#include "ptspec/numerics.hpp"
#include "ptspec/problem.hpp"
#include "ptspec/spectrum.hpp"

// Complex-contour shooting. Two solutions are launched from cutoffs on the
// wedge centre lines with the decaying asymptotic data and integrated inward
// to a matching point on the negative imaginary axis; eigenvalues are the
// energies where their Wronskian vanishes.
//
// With both boundary values normalized to psi = 1, the left solution is the
// exact PT image of the right one, so the (normalized) Wronskian at the
// matching point is real for real E and root finding happens on a real-valued
// function. No phase convention is needed beyond that normalization.

namespace ptspec::shooting {

struct ShootingConfig {
  double cutoff_radius = 8.0;
  Complex matching_point{0.0, -0.5};
  // Geometric scan ladder for eps != 2 (no WKB brackets there):
  // E_j = scan_start * scan_ratio^j, with midpoint refinement rounds.
  double scan_start = 0.2;
  double scan_ratio = 1.3;
  int scan_refine_rounds = 4;
};

// Asymptotic data at the cutoff on the wedge centre line: psi = 1 and the
// log-derivative of the decaying branch in that wedge. Throws
// std::invalid_argument when the cutoff is too small for the asymptotic form
// (leading exponent R^M / M must exceed 25).
num::OdeState boundary_state(const ProblemSpec& spec, Wedge wedge, double cutoff);

struct WronskianMismatch {
  // (psi_L psi_R' - psi_R psi_L') / (|psi_L psi_R'| + |psi_R psi_L'|) at the
  // matching point; imaginary part is roundoff for real E. In [-1, 1] by
  // construction.
  Complex value;
  double log_scale_left = 0.0;
  double log_scale_right = 0.0;
  long steps = 0;
};

WronskianMismatch wronskian_mismatch(const ProblemSpec& spec, double E,
                                     const ShootingConfig& cfg,
                                     const num::Tolerances& tol);

// Levels 0..n_max. For eps = 2 the search is bracketed by WKB; otherwise by
// the geometric ladder scan. Every root is re-solved once with the cutoff
// doubled; a level whose energy moves by more than 10 * root_tol is reported
// as a failure instead of a level.
SpectrumOutcome compute_spectrum_shooting(const ProblemSpec& spec, int n_max,
                                          const ShootingConfig& cfg,
                                          const num::Tolerances& tol);

}  // namespace ptspec::shooting
