#pragma once

#include <optional>

#include "ptspec/numerics.hpp"
#include "ptspec/problem.hpp"
#include "ptspec/spectrum.hpp"

// Scattering route to the eps = 2 spectrum. On the real axis V = -x^{2K+2} is
// an inverted barrier; a wave transmitted toward -infinity is prepared at
// x = -L, transported across the well, and decomposed at x = +L into incoming
// and outgoing waves. Bound-state energies of the wedge problem coincide with
// the reflection zeros r(E) = 0.

namespace ptspec::reflection {

struct WaveValue {
  Complex value;
  Complex derivative;
};

// First-order Liouville-Green wave q0^{-1/2} exp(+- i phase), q0 = sqrt(E - V),
// with the phase integral taken from x_ref (default 0). The sign convention
// follows asymptotic_wave's branch labels: on x < 0 the physical phase sign
// flips for even K because x^{K+2} changes sign there.
WaveValue lg_wave(const ProblemSpec& spec, double E, Branch branch, double x,
                  double x_ref, const num::Tolerances& tol = {});

struct ScatteringResult {
  double energy = 0.0;
  double half_width = 0.0;  // the L actually used
  Complex r;                // reflection amplitude
  Complex t;                // transmission amplitude
  double flux_error = 0.0;  // | |r|^2 + |t|^2 - 1 |
};

struct ScatteringOptions {
  // Matching-basis order: 1 = plain Liouville-Green, 2 adds the first phase
  // correction, 3 (default) the second. Order 3 keeps the basis truncation
  // error below the transport error at the default L.
  int basis_order = 3;
  // Override of the transmitted branch label; defaults to the branch that
  // carries left-moving current at x < 0 (the physical choice). Exposed so
  // tests can verify the K-parity convention by breaking it.
  std::optional<Branch> transmitted_branch;
};

// Requires eps = 2, E > 0 and L >= 4 E^{1/(2K+2)} (asymptotic matching needs
// |V| >> E at the cut). Throws std::invalid_argument otherwise.
ScatteringResult reflection_amplitude(const ProblemSpec& spec, double E, double L,
                                      const num::Tolerances& tol,
                                      const ScatteringOptions& opt = {});

struct ReflectionConfig {
  // Half-width of the scattering region; 0 means the default
  // max(8, 4 * E_top^{1/(2K+2)}) with E_top the top of the highest bracket.
  double half_width = 0.0;
  int scan_points = 24;  // |r| samples per WKB bracket before the line search
  ScatteringOptions scattering;
};

// Levels 0..n_max via reflection zeros inside the WKB brackets. Each zero is
// re-located once with L doubled; the allowed shift is 10 * root_tol, floored
// by a per-level conditioning estimate (the zero's slope d|r|/dE shrinks
// exponentially with n, so deep levels resolve the zero only to the transport
// noise floor divided by that slope). A level failing min |r| < 1e-5 or the
// shift gate is reported as a failure.
SpectrumOutcome compute_spectrum_reflectionless(const ProblemSpec& spec, int n_max,
                                                const ReflectionConfig& cfg,
                                                const num::Tolerances& tol);

namespace detail {

// Phase-integral momentum q(x) and its x-derivative at the given correction
// order (1..3), for real x and eps = 2. Exposed so tests can verify that each
// order shrinks the basis defect q^2 - (3/4)(q'/q)^2 + (1/2) q''/q - Q.
std::pair<double, double> corrected_momentum(const ProblemSpec& spec, double E,
                                             double x, int order);

}  // namespace detail

}  // namespace ptspec::reflection
