#include "ptspec/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace ptspec {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ProblemSpec::ProblemSpec(int k, double eps) : K(k), epsilon(eps) {
  if (k < 1) throw std::invalid_argument("ProblemSpec: K must be a positive integer");
  if (!(eps >= 0.0)) throw std::invalid_argument("ProblemSpec: epsilon must be >= 0");
}

double arg_cut_plane(Complex x) {
  double a = std::arg(x);  // principal, (-pi, pi]
  return a <= 0.5 * kPi ? a : a - 2.0 * kPi;
}

Complex pow_cut_plane(Complex x, double p) {
  double r = std::abs(x);
  if (r == 0.0) throw std::domain_error("pow_cut_plane: x = 0");
  double a = arg_cut_plane(x);
  return std::polar(std::pow(r, p), p * a);
}

Complex potential(const ProblemSpec& spec, Complex x) {
  // (ix)^eps with the principal branch of the power equals the cut-plane
  // power: multiplying by i rotates the cut onto the negative real axis.
  Complex pre = std::pow(x, Complex(2.0 * spec.K, 0.0));
  if (x.imag() == 0.0) {
    // keep the real-axis values exactly real
    double xr = x.real();
    double mag = std::pow(std::abs(xr), 2.0 * spec.K);
    pre = Complex(mag, 0.0);  // 2K even
  }
  Complex ix = Complex(0.0, 1.0) * x;
  Complex rot = spec.epsilon == 0.0 ? Complex(1.0, 0.0)
                                    : std::pow(ix, Complex(spec.epsilon, 0.0));
  if (spec.epsilon == 2.0) rot = -x * x;  // exact in the reflectionless case
  return pre * rot;
}

std::function<Complex(Complex)> schroedinger_rhs(const ProblemSpec& spec, double E) {
  return [spec, E](Complex x) { return potential(spec, x) - E; };
}

WedgeGeometry wedge_geometry(const ProblemSpec& spec) {
  double D = 2.0 * spec.K + spec.epsilon + 2.0;
  double half = kPi / D;
  WedgeGeometry g;
  g.centre_right = -spec.epsilon * kPi / (2.0 * D);
  g.centre_left = -kPi - g.centre_right;
  g.opening = 2.0 * half;
  // Written so the eps = 2 edges land exactly on 0 and -pi.
  g.upper_edge_right = kPi * (2.0 - spec.epsilon) / (2.0 * D);
  g.lower_edge_right = g.centre_right - half;
  g.upper_edge_left = -kPi - kPi * (2.0 - spec.epsilon) / (2.0 * D);
  g.lower_edge_left = g.centre_left + half;
  return g;
}

Complex asymptotic_wave(const ProblemSpec& spec, Branch branch, Complex x) {
  if (x.real() == 0.0 && x.imag() >= 0.0)
    throw std::domain_error("asymptotic_wave: x on the branch cut");
  double M = spec.exponent_order();
  Complex phase_unit = std::polar(1.0, kPi * spec.epsilon / 4.0);  // i^{eps/2}
  Complex s = branch == Branch::plus ? Complex(1.0, 0.0) : Complex(-1.0, 0.0);
  return std::exp(s * phase_unit * pow_cut_plane(x, M) / M);
}

namespace {

int branch_sign(Branch b) { return b == Branch::plus ? +1 : -1; }

// Decay of exp(s i^{eps/2} x^M / M) at angle theta: the exponent's real part
// is s |x|^M cos(eps pi/4 + M theta) / M; negative means decay.
Behavior behavior_at(const ProblemSpec& spec, Branch b, double theta) {
  double M = spec.exponent_order();
  double c = std::cos(kPi * spec.epsilon / 4.0 + M * theta);
  return branch_sign(b) * c < 0.0 ? Behavior::decays : Behavior::grows;
}

}  // namespace

int current_sign(const ProblemSpec& spec, Branch branch, double x) {
  if (spec.epsilon != 2.0)
    throw std::invalid_argument("current_sign: defined for epsilon = 2 only");
  if (x == 0.0) throw std::invalid_argument("current_sign: x must be nonzero");
  // For eps = 2, psi_b = exp(b i x^{K+2} / (K+2)) on the real axis and the
  // current is proportional to b x^{K+1}.
  double v = branch_sign(branch) * std::pow(x, spec.K + 1);
  return v > 0.0 ? +1 : -1;
}

std::array<SolutionRole, 4> classify_roles(const ProblemSpec& spec) {
  WedgeGeometry g = wedge_geometry(spec);
  std::array<SolutionRole, 4> roles;
  int i = 0;
  for (Wedge w : {Wedge::right, Wedge::left}) {
    double centre = w == Wedge::right ? g.centre_right : g.centre_left;
    double real_side = w == Wedge::right ? 1.0 : -1.0;
    for (Branch b : {Branch::plus, Branch::minus}) {
      SolutionRole role;
      role.branch = b;
      role.wedge = w;
      role.behavior = behavior_at(spec, b, centre);
      if (spec.reflectionless_case()) {
        int j = current_sign(spec, b, real_side);
        role.travel = j > 0 ? Travel::rightward : Travel::leftward;
      }
      roles[i++] = role;
    }
  }
  return roles;
}

TurningPoints turning_points(const ProblemSpec& spec, double E) {
  if (spec.epsilon != 2.0)
    throw std::invalid_argument("turning_points: defined for epsilon = 2 only");
  if (!(E > 0.0)) throw std::invalid_argument("turning_points: E must be positive");
  double p = 1.0 / (2.0 * spec.K + 2.0);
  TurningPoints tp;
  tp.right = std::polar(std::pow(E, p), -kPi * p);
  tp.left = -std::conj(tp.right);
  return tp;
}

}  // namespace ptspec
