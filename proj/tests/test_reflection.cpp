#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ptspec/reflection.hpp"
#include "ptspec/shooting.hpp"
#include "ptspec/wkb.hpp"

using namespace ptspec;

namespace {

// residual of the phase-integral momentum against the exact wave equation:
// q^{-1/2} e^{+-i int q} solves psi'' + [q^2 - D(q)] psi = 0, so the defect
// of an order-k momentum is q^2 - D(q) - Q with q'' taken by differences
double basis_defect(const ProblemSpec& spec, double E, double x, int order) {
  const double h = 1e-4;
  auto [q, qp] = reflection::detail::corrected_momentum(spec, E, x, order);
  auto qp_p = reflection::detail::corrected_momentum(spec, E, x + h, order);
  auto qp_m = reflection::detail::corrected_momentum(spec, E, x - h, order);
  double qpp = (qp_p.second - qp_m.second) / (2.0 * h);
  double D = 0.75 * (qp / q) * (qp / q) - 0.5 * qpp / q;
  double Q = E + std::pow(x, 2.0 * spec.K + 2.0);
  return std::abs(q * q - D - Q);
}

}  // namespace

TEST_CASE("each correction order shrinks the basis defect") {
  // probed where the basis is used, well outside the barrier top; measured
  // ratios there are below 3e-3 per order
  for (int K : {1, 2}) {
    CAPTURE(K);
    ProblemSpec s(K, 2.0);
    double r1 = basis_defect(s, 2.0, 5.0, 1);
    double r2 = basis_defect(s, 2.0, 5.0, 2);
    double r3 = basis_defect(s, 2.0, 5.0, 3);
    CHECK(r2 < 0.05 * r1);
    CHECK(r3 < 0.05 * r2);
  }
  CHECK_THROWS_AS(reflection::detail::corrected_momentum(ProblemSpec(1, 2.0),
                                                         2.0, 1.5, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(reflection::detail::corrected_momentum(ProblemSpec(1, 1.0),
                                                         2.0, 1.5, 1),
                  std::invalid_argument);
}

TEST_CASE("lg_wave normalization and Wronskian") {
  num::Tolerances tol;
  double E = 2.0;
  for (int K : {1, 2}) {
    CAPTURE(K);
    ProblemSpec s(K, 2.0);
    double x = -6.0;
    double Q = E + std::pow(std::abs(x), 2.0 * K + 2.0);
    auto wp = reflection::lg_wave(s, E, Branch::plus, x, x, tol);
    auto wm = reflection::lg_wave(s, E, Branch::minus, x, x, tol);
    // at the reference point the phase vanishes and |w| = Q^{-1/4}
    CHECK(std::abs(wp.value - std::pow(Q, -0.25)) < 1e-12);
    CHECK(std::abs(wm.value - std::pow(Q, -0.25)) < 1e-12);
    // Wronskian w+ w-' - w- w+' = -2i sigma_+(x); the sign tracks K parity
    Complex W = wp.value * wm.derivative - wm.value * wp.derivative;
    double sp = current_sign(s, Branch::plus, x);
    CHECK(std::abs(W - Complex(0.0, -2.0 * sp)) < 1e-10);
  }
}

TEST_CASE("lg_wave phase advances with the current direction") {
  num::Tolerances tol;
  ProblemSpec s(1, 2.0);
  double E = 2.0;
  // branch plus carries rightward current on x < 0 for K = 1, so its phase
  // grows as x moves right (step kept small so arg() does not wrap)
  auto a = reflection::lg_wave(s, E, Branch::plus, -5.99, -6.0, tol);
  double dphase = std::arg(a.value * std::pow(E + std::pow(5.99, 4.0), 0.25));
  CHECK(dphase > 0.0);
  auto b = reflection::lg_wave(s, E, Branch::minus, -5.99, -6.0, tol);
  CHECK(std::arg(b.value * std::pow(E + std::pow(5.99, 4.0), 0.25)) < 0.0);
}

TEST_CASE("lg_wave validation") {
  CHECK_THROWS_AS(reflection::lg_wave(ProblemSpec(1, 1.0), 1.0, Branch::plus,
                                      -5.0, -6.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(reflection::lg_wave(ProblemSpec(1, 2.0), -1.0, Branch::plus,
                                      -5.0, -6.0),
                  std::invalid_argument);
}

TEST_CASE("scattering conserves flux away from resonance") {
  num::Tolerances tol;
  ProblemSpec s(1, 2.0);
  auto sr = reflection::reflection_amplitude(s, 2.0, 8.0, tol);
  CHECK(sr.flux_error < 1e-6);
  CHECK(std::abs(sr.r) < 1.0);
  CHECK(std::abs(sr.t) < 1.0);
  CHECK(sr.half_width == 8.0);
}

TEST_CASE("matching-basis order sets the systematic error of a zero") {
  // flux cannot see the basis order (the q^{-1/2} waves carry unit current at
  // every order), but the located zero can: the order-3 zero is converged in
  // the matching point while order 1 leaves a visible offset
  num::Tolerances tol;
  ProblemSpec s(1, 2.0);
  auto zero_near = [&](double lo, double hi, double L, int order) {
    reflection::ScatteringOptions o;
    o.basis_order = order;
    auto f = [&](double E) {
      return std::abs(reflection::reflection_amplitude(s, E, L, tol, o).r);
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 70; ++i) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - g * (hi - lo); f1 = f(x1);
      } else {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + g * (hi - lo); f2 = f(x2);
      }
    }
    return 0.5 * (lo + hi);
  };
  double z3 = zero_near(5.9, 6.1, 8.0, 3);
  double z3_far = zero_near(5.9, 6.1, 11.0, 3);
  double z1 = zero_near(5.9, 6.1, 8.0, 1);
  CHECK(std::abs(z3 - z3_far) < 1e-9);
  CHECK(std::abs(z1 - z3) > 1e-5);
  CHECK(std::abs(z1 - z3) < 1e-3);
}

TEST_CASE("preparing the wrong transmitted branch breaks unitarity") {
  num::Tolerances tol;
  for (int K : {1, 2}) {
    CAPTURE(K);
    ProblemSpec s(K, 2.0);
    Branch good = current_sign(s, Branch::plus, -1.0) < 0 ? Branch::plus
                                                          : Branch::minus;
    reflection::ScatteringOptions bad;
    bad.transmitted_branch = good == Branch::plus ? Branch::minus : Branch::plus;
    auto sr = reflection::reflection_amplitude(s, 2.0, 8.0, tol, bad);
    CHECK(sr.flux_error > 1e-2);
  }
}

TEST_CASE("reflection_amplitude validation") {
  num::Tolerances tol;
  ProblemSpec s(1, 2.0);
  CHECK_THROWS_AS(reflection::reflection_amplitude(ProblemSpec(1, 0.0), 2.0,
                                                   8.0, tol),
                  std::invalid_argument);
  CHECK_THROWS_AS(reflection::reflection_amplitude(s, -2.0, 8.0, tol),
                  std::invalid_argument);
  CHECK_THROWS_AS(reflection::reflection_amplitude(s, 16.0, 4.0, tol),
                  std::invalid_argument);
  reflection::ScatteringOptions o;
  o.basis_order = 0;
  CHECK_THROWS_AS(reflection::reflection_amplitude(s, 2.0, 8.0, tol, o),
                  std::invalid_argument);
}

TEST_CASE("one reflection dip per WKB bracket") {
  num::Tolerances tol;
  ProblemSpec s(1, 2.0);
  auto brackets = wkb::energy_brackets(s, 3, 0.4);
  for (const auto& br : brackets) {
    CAPTURE(br.n);
    double L = std::max(8.0, 4.0 * std::pow(br.hi, 0.25));
    const int m = 40;
    std::vector<double> rabs(m);
    for (int i = 0; i < m; ++i) {
      double E = br.lo + (br.hi - br.lo) * double(i) / (m - 1);
      rabs[i] = std::abs(reflection::reflection_amplitude(s, E, L, tol).r);
    }
    int minima = 0;
    for (int i = 1; i + 1 < m; ++i)
      if (rabs[i] < rabs[i - 1] && rabs[i] <= rabs[i + 1]) ++minima;
    CHECK(minima == 1);
  }
}

TEST_CASE("reflection zeros land on the shooting eigenvalues") {
  num::Tolerances tol;
  ProblemSpec s(1, 2.0);
  auto shoot =
      shooting::compute_spectrum_shooting(s, 2, shooting::ShootingConfig{}, tol);
  auto refl = reflection::compute_spectrum_reflectionless(
      s, 2, reflection::ReflectionConfig{}, tol);
  REQUIRE(shoot.failures.empty());
  REQUIRE(refl.failures.empty());
  REQUIRE(shoot.levels.size() == 3);
  REQUIRE(refl.levels.size() == 3);
  for (int n = 0; n <= 2; ++n) {
    CAPTURE(n);
    CHECK(refl.levels[n].method == "reflectionless");
    CHECK(std::abs(refl.levels[n].residual) < 1e-5);
    CHECK(std::abs(refl.levels[n].energy - shoot.levels[n].energy) <
          1e-5 * shoot.levels[n].energy);
  }
}

TEST_CASE("sextic-well reflection zeros land on the shooting eigenvalues") {
  num::Tolerances tol;
  ProblemSpec s(2, 2.0);
  auto shoot =
      shooting::compute_spectrum_shooting(s, 1, shooting::ShootingConfig{}, tol);
  auto refl = reflection::compute_spectrum_reflectionless(
      s, 1, reflection::ReflectionConfig{}, tol);
  REQUIRE(shoot.failures.empty());
  REQUIRE(refl.failures.empty());
  REQUIRE(shoot.levels.size() == 2);
  REQUIRE(refl.levels.size() == 2);
  for (int n = 0; n <= 1; ++n) {
    CAPTURE(n);
    CHECK(std::abs(refl.levels[n].energy - shoot.levels[n].energy) <
          1e-5 * shoot.levels[n].energy);
  }
  // the two independent methods agree on this level to nine digits
  CHECK(std::abs(refl.levels[1].energy - 5.262586602) < 1e-6);
}

TEST_CASE("spectrum configuration validation") {
  num::Tolerances tol;
  reflection::ReflectionConfig cfg;
  CHECK_THROWS_AS(reflection::compute_spectrum_reflectionless(
                      ProblemSpec(1, 2.0), -1, cfg, tol),
                  std::invalid_argument);
  cfg.scan_points = 4;
  CHECK_THROWS_AS(reflection::compute_spectrum_reflectionless(
                      ProblemSpec(1, 2.0), 2, cfg, tol),
                  std::invalid_argument);
}
