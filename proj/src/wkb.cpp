#include "ptspec/wkb.hpp"

#include <cmath>
#include <stdexcept>

namespace ptspec::wkb {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

namespace detail {

Complex tracked_sqrt(const std::function<Complex(Complex)>& f, Complex t_ref,
                     Complex v_ref, Complex t, int march_steps) {
  Complex prev = v_ref;
  Complex d = t - t_ref;
  for (int j = 1; j <= march_steps; ++j) {
    Complex w = std::sqrt(f(t_ref + d * (double(j) / march_steps)));
    if (std::abs(w - prev) > std::abs(w + prev)) w = -w;
    prev = w;
  }
  return prev;
}

Complex sqrt_integral_segment(const std::function<Complex(Complex)>& f,
                              Complex a, Complex b, Complex t_ref, Complex v_ref,
                              double quad_tol) {
  const Complex mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const Complex v_mid = tracked_sqrt(f, t_ref, v_ref, mid);
  // t(s) = mid + half sin(pi s / 2) concentrates nodes at the ends, where the
  // integrand may vanish like a square root (turning points).
  auto g = [&](Complex s) {
    double sr = s.real();
    Complex t = mid + half * std::sin(0.5 * kPi * sr);
    Complex root = tracked_sqrt(f, mid, v_mid, t);
    return root * half * (0.5 * kPi) * std::cos(0.5 * kPi * sr);
  };
  return num::quad_complex_segment(g, Complex(-1.0, 0.0), Complex(1.0, 0.0),
                                   quad_tol);
}

}  // namespace detail

double action_integral(const ProblemSpec& spec, double E, double quad_tol) {
  TurningPoints tp = turning_points(spec, E);  // validates eps = 2, E > 0
  auto f = [&spec, E](Complex t) { return E - potential(spec, t); };
  Complex mid = 0.5 * (tp.left + tp.right);
  Complex v_mid = std::sqrt(f(mid));
  Complex I = detail::sqrt_integral_segment(f, tp.left, tp.right, mid, v_mid,
                                            quad_tol);
  if (std::abs(I.imag()) > 1e-8 * (1.0 + std::abs(I)))
    throw num::ConvergenceError(
        "action_integral: non-negligible imaginary part; branch tracking failed");
  // the overall sign is a sheet choice
  return std::abs(I.real());
}

double closed_form_energy(const ProblemSpec& spec, int n) {
  if (!spec.reflectionless_case())
    throw std::invalid_argument("closed_form_energy: defined for epsilon = 2 only");
  if (n < 0) throw std::invalid_argument("closed_form_energy: n must be >= 0");
  double p = 1.0 / (2.0 * spec.K + 2.0);  // 1/(2K+2)
  double I1 = std::sqrt(kPi) * num::gamma_real(p) * std::cos(kPi * p) /
              ((spec.K + 2.0) * num::gamma_real((spec.K + 2.0) * p));
  // I(E) = I(1) E^{(K+2)/(2K+2)} = (n + 1/2) pi
  double expo = (2.0 * spec.K + 2.0) / (spec.K + 2.0);
  return std::pow((n + 0.5) * kPi / I1, expo);
}

double quadrature_energy(const ProblemSpec& spec, int n, const num::Tolerances& tol) {
  double guess = closed_form_energy(spec, n);
  double target = (n + 0.5) * kPi;
  auto fn = [&](double E) { return action_integral(spec, E, tol.quad_tol) - target; };
  auto res = num::find_root_bracketed(fn, 0.5 * guess, 2.0 * guess, tol.root_tol);
  return res.root;
}

std::vector<EnergyBracket> energy_brackets(const ProblemSpec& spec, int n_max,
                                           double margin) {
  if (n_max < 0) throw std::invalid_argument("energy_brackets: n_max must be >= 0");
  if (!(margin > 0.0) || !(margin < 0.5))
    throw std::invalid_argument("energy_brackets: margin must lie in (0, 1/2)");
  std::vector<double> e(n_max + 2);
  for (int n = 0; n <= n_max + 1; ++n) e[n] = closed_form_energy(spec, n);
  std::vector<EnergyBracket> out;
  out.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    double gap_below = n == 0 ? e[0] : e[n] - e[n - 1];
    double gap_above = e[n + 1] - e[n];
    out.push_back({n, e[n] - margin * gap_below, e[n] + margin * gap_above});
  }
  for (int n = 0; n < n_max; ++n)
    if (!(out[n].hi < out[n + 1].lo))
      throw num::ConvergenceError("energy_brackets: brackets overlap");
  return out;
}

}  // namespace ptspec::wkb
