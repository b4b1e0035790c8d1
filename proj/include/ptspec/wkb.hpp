#pragma once

#include <functional>
#include <vector>

#include "ptspec/numerics.hpp"
#include "ptspec/problem.hpp"

// Leading-order WKB for the eps = 2 member V = -x^{2K+2}: the quantization
// integral between the complex turning points, its closed form, and the energy
// estimates and brackets used to seed the exact solvers.

namespace ptspec::wkb {

// I(E) = Re \int_{x_-}^{x_+} sqrt(E - V) dx along the straight chord joining
// the turning points. Scales as I(E) = I(1) E^{(K+2)/(2K+2)}.
double action_integral(const ProblemSpec& spec, double E, double quad_tol);

// Closed form of the quantization condition I(E) = (n + 1/2) pi:
//   E_n = [ (n+1/2) sqrt(pi) (K+2) Gamma((K+2)/(2K+2))
//           / ( Gamma(1/(2K+2)) cos(pi/(2K+2)) ) ]^{(2K+2)/(K+2)}
double closed_form_energy(const ProblemSpec& spec, int n);

// Same quantization condition solved numerically on action_integral; agrees
// with the closed form to the quadrature/root tolerances.
double quadrature_energy(const ProblemSpec& spec, int n, const num::Tolerances& tol);

struct EnergyBracket {
  int n;
  double lo;
  double hi;
};

// Disjoint search intervals around the WKB energies, one per level 0..n_max.
// margin in (0, 1/2) is the fraction of the gap to the neighbouring level
// claimed on each side (the gap below the ground state is taken as E_0).
std::vector<EnergyBracket> energy_brackets(const ProblemSpec& spec, int n_max,
                                           double margin);

namespace detail {

// sqrt(f(t)) continued along the straight run from t_ref (where the principal
// value v_ref is taken) to t, flipping sheets whenever the principal branch
// jumps. Pure: re-marches the run each call.
Complex tracked_sqrt(const std::function<Complex(Complex)>& f, Complex t_ref,
                     Complex v_ref, Complex t, int march_steps = 16);

// Action integrand machinery exposed for path-independence tests: integrates
// sqrt(f) over one straight segment [a, b] with the branch seeded at (t_ref,
// v_ref), using the sin substitution to soften endpoint turning points.
Complex sqrt_integral_segment(const std::function<Complex(Complex)>& f,
                              Complex a, Complex b, Complex t_ref, Complex v_ref,
                              double quad_tol);

}  // namespace detail

}  // namespace ptspec::wkb
