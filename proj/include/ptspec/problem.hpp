#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>

// Model of the non-Hermitian oscillator family H = p^2 + x^{2K} (ix)^eps.
//
// The eigenvalue problem -psi'' + [x^{2K}(ix)^eps - E] psi = 0 is posed on a
// contour whose ends sink into the two Stokes wedges below the real axis in
// which bound-state solutions decay. Everything here is pure geometry and
// asymptotics of that problem: wedge angles, the leading large-|x| wave forms,
// which branch decays where, and (for eps = 2) classical turning points and
// travel directions on the real axis.

namespace ptspec {

using Complex = std::complex<double>;

enum class Branch { plus, minus };
enum class Wedge { left, right };
enum class Behavior { decays, grows };
enum class Travel { leftward, rightward };

struct ProblemSpec {
  int K;           // exponent of the Hermitian prefactor x^{2K}, K >= 1
  double epsilon;  // non-negative deformation exponent of (ix)^eps

  ProblemSpec(int k, double eps);

  double degree() const { return 2.0 * K + epsilon; }

  // M = K + 1 + eps/2; the leading WKB phase at large |x| is x^M / M.
  double exponent_order() const { return K + 1.0 + 0.5 * epsilon; }

  // eps = 2 turns the potential into -x^{2K+2}: real, negative, reflectionless.
  bool reflectionless_case() const { return epsilon == 2.0; }
};

// Argument on the cut plane used throughout: the branch cut runs up the
// positive imaginary axis, arg x in (-3pi/2, pi/2]. Both wedges and the whole
// lower half plane are reached from the real axis without touching the cut.
double arg_cut_plane(Complex x);

// x^p on that cut plane.
Complex pow_cut_plane(Complex x, double p);

// V(x) = x^{2K} (ix)^eps with the same branch convention.
Complex potential(const ProblemSpec& spec, Complex x);

// Coefficient q(x) = V(x) - E of psi'' = q(x) psi, packaged for the integrator.
std::function<Complex(Complex)> schroedinger_rhs(const ProblemSpec& spec, double E);

struct WedgeGeometry {
  double centre_right;  // anti-Stokes centre line of the right wedge
  double centre_left;
  double opening;       // angular width of each wedge
  // "upper" = the edge adjacent to the real axis. For the right wedge that is
  // centre + opening/2, for the left wedge centre - opening/2.
  double upper_edge_right;
  double lower_edge_right;
  double upper_edge_left;
  double lower_edge_left;
};

WedgeGeometry wedge_geometry(const ProblemSpec& spec);

// Leading asymptotic solutions psi_pm(x) = exp(+- i^{eps/2} x^M / M), M from
// exponent_order(). Valid away from the cut; throws std::domain_error on the
// cut or at x = 0.
Complex asymptotic_wave(const ProblemSpec& spec, Branch branch, Complex x);

struct SolutionRole {
  Branch branch;
  Wedge wedge;
  Behavior behavior;
  // Only meaningful on the real axis when eps = 2 (oscillatory regime).
  std::optional<Travel> travel;
};

// The four (branch, wedge) combinations with their decay/growth roles, and for
// eps = 2 the direction of probability current carried on the adjacent stretch
// of real axis. K-parity matters: under PT the branches map to themselves for
// odd K and swap for even K.
std::array<SolutionRole, 4> classify_roles(const ProblemSpec& spec);

// Sign of the probability current j ~ Im(psi* psi') of asymptotic_wave on the
// real axis, eps = 2 only. x must be real and nonzero.
int current_sign(const ProblemSpec& spec, Branch branch, double x);

struct TurningPoints {
  Complex right;  // E^{1/(2K+2)} e^{-i pi/(2K+2)}, just below the positive axis
  Complex left;   // its PT image -conj(right)
};

// Classical turning points V(x) = E for eps = 2, E > 0.
TurningPoints turning_points(const ProblemSpec& spec, double E);

}  // namespace ptspec
