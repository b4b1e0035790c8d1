#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

// Numerical kernels: real gamma, adaptive Runge-Kutta transport of the linear
// Schroedinger ODE along complex polylines, bracketed root finding, adaptive
// Gauss-Kronrod quadrature along complex segments, and a small thread pool
// helper. No dependencies on the physics layer.

namespace ptspec::num {

using Complex = std::complex<double>;

// Piecewise-straight contour; integration and quadrature walk it segment by
// segment in order.
using Contour = std::vector<Complex>;

struct Tolerances {
  double ode_rel = 1e-10;
  double ode_abs = 1e-12;
  double root_tol = 1e-9;   // absolute, on the energy argument
  double quad_tol = 1e-11;  // absolute, scaled internally by (1 + |estimate|)
};

// Thrown when an iteration fails to converge within its budget. Contract
// violations (bad arguments) throw std::invalid_argument instead.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gamma function for x > 0; throws std::invalid_argument otherwise.
// Relative error below 1e-12 on (0, 30].
double gamma_real(double x);

struct OdeState {
  Complex position;
  Complex psi;
  Complex dpsi;
};

struct OdeOptions {
  Tolerances tol;
  // Optional cap on |dx| as a function of position (e.g. a fraction of the
  // local wavelength). Empty means uncapped.
  std::function<double(Complex)> max_step;
  double rescale_threshold = 1e100;
};

struct OdeResult {
  OdeState state;
  // (psi, dpsi) have been divided by e^{log_scale} relative to the true
  // solution; log_scale accumulates whenever the numbers threaten overflow.
  double log_scale = 0.0;
  long steps = 0;
  int rescales = 0;
};

// Integrates psi'' = q(x) psi along the contour with an embedded
// Dormand-Prince 5(4) pair, PI step control (safety 0.9, step ratio clamped to
// [0.2, 5.0]), and automatic rescaling. q is any callable, which doubles as
// the unit-test hook: pass q = const for closed-form checks.
OdeResult integrate_ode(const std::function<Complex(Complex)>& q,
                        const Contour& contour, Complex psi, Complex dpsi,
                        const OdeOptions& opt);

struct RootResult {
  double root;
  double f_root;
  int iterations;
};

// Hybrid bisection/secant on a bracketing interval: f(lo) and f(hi) must have
// opposite signs. Converges when the bracket width drops below tol.
RootResult find_root_bracketed(const std::function<double(double)>& f,
                               double lo, double hi, double tol,
                               int max_iter = 200);

// Adaptive Gauss-Kronrod 7/15 along the straight segment [a, b]. Handles
// integrable endpoint singularities up to inverse-square-root strength (the
// nodes are interior; the worklist refines toward the endpoint geometrically).
Complex quad_complex_segment(const std::function<Complex(Complex)>& g,
                             Complex a, Complex b, double tol);

// Runs body(0..count-1) on a small thread pool. The body must only write to
// its own slot; the first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ptspec::num
