#include "ptspec/reflection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "ptspec/wkb.hpp"

namespace ptspec::reflection {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Truncated Taylor (jet) arithmetic. The phase-integral corrections need up to
// five derivatives of sqrt(Q); carrying them as jets of the polynomial Q keeps
// every derivative exact to roundoff. Coefficients are Taylor coefficients
// f^{(k)}(x0)/k!, so products are plain convolutions and all recurrences are
// triangular: garbage never flows from high orders down.

constexpr int kJet = 6;

struct Jet {
  std::array<double, kJet + 1> c{};
};

Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  for (int i = 0; i <= kJet; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  for (int i = 0; i <= kJet; ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (int i = 0; i <= kJet; ++i)
    for (int j = 0; i + j <= kJet; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

Jet operator*(double s, const Jet& a) {
  Jet r;
  for (int i = 0; i <= kJet; ++i) r.c[i] = s * a.c[i];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k <= kJet; ++k) {
    double acc = a.c[k];
    for (int j = 0; j < k; ++j) acc -= r.c[j] * b.c[k - j];
    r.c[k] = acc / b.c[0];
  }
  return r;
}

Jet jet_sqrt(const Jet& a) {
  Jet r;
  r.c[0] = std::sqrt(a.c[0]);
  for (int k = 1; k <= kJet; ++k) {
    double acc = a.c[k];
    for (int j = 1; j < k; ++j) acc -= r.c[j] * r.c[k - j];
    r.c[k] = acc / (2.0 * r.c[0]);
  }
  return r;
}

Jet jet_diff(const Jet& a) {
  Jet r;
  for (int i = 0; i < kJet; ++i) r.c[i] = (i + 1) * a.c[i + 1];
  return r;
}

// D(q) = (3/4)(q'/q)^2 - (1/2) q''/q; the basis q^{-1/2} e^{+-i int q} solves
// psi'' + [q^2 - D(q)] psi = 0 exactly, so successive corrections push q^2 -
// D(q) toward Q.
Jet defect(const Jet& q) {
  Jet dq = jet_diff(q);
  Jet ddq = jet_diff(dq);
  Jet ratio = dq / q;
  return 0.75 * (ratio * ratio) - 0.5 * (ddq / q);
}

Jet momentum_jet(const ProblemSpec& spec, double E, double x, int order) {
  const int p = 2 * spec.K + 2;
  Jet Q;
  Q.c[0] = E + std::pow(x, p);
  double binom = 1.0;
  for (int k = 1; k <= kJet; ++k) {
    binom *= double(p - k + 1) / k;
    Q.c[k] = k <= p ? binom * std::pow(x, p - k) : 0.0;
  }
  Jet q0 = jet_sqrt(Q);
  if (order <= 1) return q0;
  Jet D0 = defect(q0);
  Jet d1 = D0 / (2.0 * q0);
  Jet q1 = q0 + d1;
  if (order == 2) return q1;
  Jet d2 = (defect(q1) - D0 - d1 * d1) / (2.0 * q0);
  return q1 + d2;
}

}  // namespace

namespace detail {

std::pair<double, double> corrected_momentum(const ProblemSpec& spec, double E,
                                             double x, int order) {
  if (!spec.reflectionless_case())
    throw std::invalid_argument("corrected_momentum: epsilon must be 2");
  if (order < 1 || order > 3)
    throw std::invalid_argument("basis_order: must be 1, 2 or 3");
  Jet q = momentum_jet(spec, E, x, order);
  return {q.c[0], q.c[1]};
}

}  // namespace detail

namespace {

// Matching phase theta(L) = int_0^L sqrt(E - V). The corrected momentum is
// asymptotic and misbehaves near the flat barrier top at low E, so it is not
// integrated here: a different theta is a pure gauge (r -> r e^{2i delta},
// t -> t e^{i sigma delta}) and cancels in |r|, |t|, the flux and the zero
// positions.
double phase_integral(const ProblemSpec& spec, double E, double L,
                      double quad_tol) {
  const double p = 2.0 * spec.K + 2.0;
  auto g = [&](Complex x) {
    return Complex(std::sqrt(E + std::pow(x.real(), p)), 0.0);
  };
  Complex th =
      num::quad_complex_segment(g, Complex(0.0, 0.0), Complex(L, 0.0), quad_tol);
  return th.real();
}

struct BasisWave {
  Complex w, dw;
};

// q^{-1/2} e^{i sigma theta(x)} and its derivative at x = +-L; theta and q'
// follow from parity (Q is even).
BasisWave basis_wave(double q, double qp_right, double theta_right, double x,
                     int sigma) {
  double qp = x < 0.0 ? -qp_right : qp_right;
  double theta = x < 0.0 ? -theta_right : theta_right;
  Complex i(0.0, 1.0);
  Complex w = std::pow(q, -0.5) * std::exp(i * double(sigma) * theta);
  Complex dw = w * (i * double(sigma) * q - qp / (2.0 * q));
  return {w, dw};
}

}  // namespace

WaveValue lg_wave(const ProblemSpec& spec, double E, Branch branch, double x,
                  double x_ref, const num::Tolerances& tol) {
  if (!spec.reflectionless_case())
    throw std::invalid_argument("lg_wave: epsilon must be 2");
  if (!(E > 0.0)) throw std::invalid_argument("energy: must be positive");
  // branch label -> local phase direction (K-parity convention)
  int sigma = current_sign(spec, branch, x != 0.0 ? x : 1.0);
  auto g = [&](Complex t) {
    double tr = t.real();
    double Q = E + std::pow(std::abs(tr), double(2 * spec.K + 2));
    return Complex(std::sqrt(Q), 0.0);
  };
  double phase = num::quad_complex_segment(g, Complex(x_ref, 0.0),
                                           Complex(x, 0.0), tol.quad_tol)
                     .real();
  double Q = E + std::pow(std::abs(x), double(2 * spec.K + 2));
  double Qp = (2.0 * spec.K + 2.0) * std::pow(x, double(2 * spec.K + 1));
  double q = std::sqrt(Q);
  Complex i(0.0, 1.0);
  Complex w = std::pow(Q, -0.25) * std::exp(i * double(sigma) * phase);
  Complex dw = w * (i * double(sigma) * q - Qp / (4.0 * Q));
  return {w, dw};
}

ScatteringResult reflection_amplitude(const ProblemSpec& spec, double E, double L,
                                      const num::Tolerances& tol,
                                      const ScatteringOptions& opt) {
  if (!spec.reflectionless_case())
    throw std::invalid_argument("reflection_amplitude: epsilon must be 2");
  if (!(E > 0.0)) throw std::invalid_argument("energy: must be positive");
  double Lmin = 4.0 * std::pow(E, 1.0 / (2.0 * spec.K + 2.0));
  if (!(L >= Lmin))
    throw std::invalid_argument(
        "half_width: L must be at least 4 E^{1/(2K+2)}");
  if (opt.basis_order < 1 || opt.basis_order > 3)
    throw std::invalid_argument("basis_order: must be 1, 2 or 3");

  // transmitted wave: left-moving current on x < 0
  Branch bt = opt.transmitted_branch.value_or(
      current_sign(spec, Branch::plus, -1.0) < 0 ? Branch::plus : Branch::minus);
  int sigma_t = current_sign(spec, bt, -1.0);

  double theta = phase_integral(spec, E, L, tol.quad_tol);
  Jet qjet = momentum_jet(spec, E, L, opt.basis_order);
  double q = qjet.c[0], qp = qjet.c[1];

  BasisWave transmitted = basis_wave(q, qp, theta, -L, sigma_t);

  auto rhs = schroedinger_rhs(spec, E);
  num::OdeOptions oopt;
  oopt.tol = tol;
  const int p = 2 * spec.K + 2;
  oopt.max_step = [E, p](Complex x) {
    double Q = E + std::pow(std::abs(x.real()), double(p));
    return kPi / (2.0 * std::sqrt(Q));
  };
  num::OdeResult res =
      num::integrate_ode(rhs, {Complex(-L, 0.0), Complex(L, 0.0)},
                         transmitted.w, transmitted.dw, oopt);

  // decompose at +L into incoming (leftward) and outgoing (rightward) waves
  BasisWave in = basis_wave(q, qp, theta, L, -1);
  BasisWave outw = basis_wave(q, qp, theta, L, +1);
  Complex det = in.w * outw.dw - outw.w * in.dw;
  double cond = (std::abs(in.w * outw.dw) + std::abs(outw.w * in.dw)) /
                std::abs(det);
  if (!(cond < 1e8))
    throw num::ConvergenceError(
        "reflection_amplitude: wave decomposition is ill-conditioned");
  Complex A = (res.state.psi * outw.dw - res.state.dpsi * outw.w) / det;
  Complex B = (res.state.dpsi * in.w - res.state.psi * in.dw) / det;

  ScatteringResult sr;
  sr.energy = E;
  sr.half_width = L;
  sr.r = B / A;
  sr.t = std::exp(-res.log_scale) / A;
  sr.flux_error = std::abs(std::norm(sr.r) + std::norm(sr.t) - 1.0);
  return sr;
}

namespace {

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;  // |r| at x
};

// Golden-section minimum of |r(E)| on [a, b].
GoldenResult golden_min(const std::function<double(double)>& f, double a,
                        double b, double width_tol) {
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > width_tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? GoldenResult{x1, f1} : GoldenResult{x2, f2};
}

}  // namespace

SpectrumOutcome compute_spectrum_reflectionless(const ProblemSpec& spec, int n_max,
                                                const ReflectionConfig& cfg,
                                                const num::Tolerances& tol) {
  if (n_max < 0) throw std::invalid_argument("n_max: must be >= 0");
  if (cfg.scan_points < 8)
    throw std::invalid_argument("scan_points: need at least 8");

  auto brackets = wkb::energy_brackets(spec, n_max, 0.4);
  const double inv_deg = 1.0 / (2.0 * spec.K + 2.0);
  const double L = cfg.half_width > 0.0
                       ? cfg.half_width
                       : std::max(8.0, 4.0 * std::pow(brackets.back().hi, inv_deg));

  std::vector<std::optional<EnergyLevel>> levels(n_max + 1);
  std::vector<std::optional<LevelFailure>> failures(n_max + 1);

  num::parallel_for(std::size_t(n_max) + 1, [&](std::size_t ni) {
    const auto& br = brackets[ni];
    try {
      auto amplitude = [&](double E, double half_width) {
        return reflection_amplitude(spec, E, half_width, tol, cfg.scattering);
      };

      const int m = cfg.scan_points;
      std::vector<double> es(m), rabs(m);
      std::vector<Complex> rs(m);
      for (int i = 0; i < m; ++i) {
        es[i] = br.lo + (br.hi - br.lo) * double(i) / (m - 1);
        rs[i] = amplitude(es[i], L).r;
        rabs[i] = std::abs(rs[i]);
      }

      double rmax = *std::max_element(rabs.begin(), rabs.end());

      // the interference envelope of |r| shrinks exponentially with n; once
      // the whole bracket sits at the transport noise floor a minimum of the
      // noise would sail through every later gate, so reject the level here
      double noise_floor = 10.0 * std::max(tol.ode_rel, 1e-13);
      if (!(rmax > 20.0 * noise_floor)) {
        std::ostringstream os;
        os.precision(6);
        os << "reflection envelope " << rmax
           << " is below the transport noise floor " << noise_floor
           << "; the zero cannot be resolved at this depth";
        failures[ni] = LevelFailure{int(ni), os.str()};
        return;
      }

      // candidate dip: the phase of r reverses across a zero; pick the
      // reversal with the deepest |r|, falling back to the grid minimum
      int dip = -1;
      double dip_depth = 2.0 * rmax;
      for (int i = 0; i + 1 < m; ++i) {
        Complex c = rs[i] * std::conj(rs[i + 1]);
        if (c.real() < 0.0) {
          double depth = std::min(rabs[i], rabs[i + 1]);
          if (depth < dip_depth) {
            dip = i;
            dip_depth = depth;
          }
        }
      }
      if (dip < 0) {
        dip = int(std::min_element(rabs.begin(), rabs.end()) - rabs.begin());
        if (dip == 0 || dip == m - 1) {
          failures[ni] = LevelFailure{
              int(ni), "no reflection dip isolated inside the WKB bracket"};
          return;
        }
        --dip;  // interior minimum at index dip -> straddle [dip-1+1, dip+1+1]
      }
      int ilo = std::max(0, dip - 1), ihi = std::min(m - 1, dip + 2);

      double width_tol = std::max(tol.root_tol, 1e-13 * es[dip]);
      GoldenResult g1 = golden_min(
          [&](double E) { return std::abs(amplitude(E, L).r); }, es[ilo],
          es[ihi], width_tol);

      // signal contrast: if the dip is not well below the bracket's plateau
      // the zero is buried in transport noise and the level is unresolved
      if (!(g1.fx < 0.1 * rmax)) {
        std::ostringstream os;
        os.precision(6);
        os << "no reflection contrast: min |r| = " << g1.fx
           << " against a scan plateau of " << rmax;
        failures[ni] = LevelFailure{int(ni), os.str()};
        return;
      }
      if (!(g1.fx < 1e-5)) {
        std::ostringstream os;
        os.precision(6);
        os << "reflection zero too shallow: min |r| = " << g1.fx;
        failures[ni] = LevelFailure{int(ni), os.str()};
        return;
      }

      // slope of |r| flanking the zero, for the conditioning floor; the run
      // is floored so a zero hugging a grid point cannot inflate the slope
      double min_run = 0.125 * (es[ihi] - es[ilo]);
      double slope = std::max(
          std::abs(rabs[ilo] - g1.fx) / std::max(g1.x - es[ilo], min_run),
          std::abs(rabs[ihi] - g1.fx) / std::max(es[ihi] - g1.x, min_run));
      // The zero can only be located to (transport noise in r) / slope; deep
      // levels have exponentially small slope, so the raw tolerance gate is
      // floored by that estimate.
      double gate = std::max(10.0 * tol.root_tol, noise_floor / slope);

      double w2 = std::max({4.0 * gate, 1e-7 * g1.x, 4.0 * width_tol});
      GoldenResult g2 = golden_min(
          [&](double E) { return std::abs(amplitude(E, 2.0 * L).r); },
          std::max(g1.x - w2, br.lo), std::min(g1.x + w2, br.hi), width_tol);
      double shift = std::abs(g2.x - g1.x);
      if (shift > gate) {
        std::ostringstream os;
        os.precision(12);
        os << "reflection zero not converged in L: moved by " << shift
           << " when L was doubled (gate " << gate << ")";
        failures[ni] = LevelFailure{int(ni), os.str()};
        return;
      }

      EnergyLevel lvl;
      lvl.n = int(ni);
      lvl.energy = g2.x;
      lvl.residual = g2.fx;
      lvl.recheck_shift = shift;
      lvl.method = "reflectionless";
      levels[ni] = lvl;
    } catch (const std::exception& e) {
      failures[ni] = LevelFailure{int(ni), e.what()};
    }
  });

  SpectrumOutcome outcome;
  for (int n = 0; n <= n_max; ++n) {
    if (levels[n].has_value()) outcome.levels.push_back(*levels[n]);
    if (failures[n].has_value()) outcome.failures.push_back(*failures[n]);
  }
  return outcome;
}

}  // namespace ptspec::reflection
