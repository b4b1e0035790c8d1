#include "ptspec/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace ptspec::num {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// gamma

double gamma_real(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("gamma_real: requires x > 0");
  // Lanczos, g = 7, 9 terms (Godfrey's coefficient set). Reflection keeps the
  // series on z >= 0.5 where it holds ~15 digits.
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_real(1.0 - x));
  static const double g[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  double z = x - 1.0;
  double s = g[0];
  for (int i = 1; i < 9; ++i) s += g[i] / (z + i);
  double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * s;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) transport of psi'' = q(x) psi

namespace {

struct Deriv {
  Complex f0, f1;
};

std::string position_string(Complex x) {
  std::ostringstream os;
  os << "(" << x.real() << ", " << x.imag() << ")";
  return os.str();
}

}  // namespace

OdeResult integrate_ode(const std::function<Complex(Complex)>& q,
                        const Contour& contour, Complex psi, Complex dpsi,
                        const OdeOptions& opt) {
  if (contour.size() < 2)
    throw std::invalid_argument("integrate_ode: contour needs at least two points");

  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // fifth-order minus embedded fourth-order weights
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double rtol = opt.tol.ode_rel, atol = opt.tol.ode_abs;
  const long max_steps = 40'000'000;

  OdeResult out;
  Complex y0 = psi, y1 = dpsi;

  for (std::size_t s = 0; s + 1 < contour.size(); ++s) {
    const Complex A = contour[s];
    const Complex d = contour[s + 1] - A;
    const double seg = std::abs(d);
    if (seg == 0.0) continue;

    // parametrize x = A + tau d, tau in [0, 1]
    auto f = [&](double tau, Complex u0, Complex u1) -> Deriv {
      Complex x = A + tau * d;
      return {d * u1, d * q(x) * u0};
    };

    double tau = 0.0;
    double h = 1e-2;
    double err_old = 1.0e-4;
    Deriv k1 = f(0.0, y0, y1);

    while (tau < 1.0 - 1e-14) {
      double cap = 1.0 - tau;
      if (opt.max_step) {
        double ms = opt.max_step(A + tau * d);
        if (!(ms > 0.0))
          throw std::invalid_argument("integrate_ode: max_step must stay positive");
        cap = std::min(cap, ms / seg);
      }
      double ht = std::min(h, cap);
      if (ht < 1e-15)
        throw ConvergenceError("integrate_ode: step size underflow near x = " +
                               position_string(A + tau * d));
      if (++out.steps > max_steps)
        throw ConvergenceError("integrate_ode: step budget exhausted near x = " +
                               position_string(A + tau * d));

      Deriv k2 = f(tau + c2 * ht, y0 + ht * (a21 * k1.f0),
                   y1 + ht * (a21 * k1.f1));
      Deriv k3 = f(tau + c3 * ht, y0 + ht * (a31 * k1.f0 + a32 * k2.f0),
                   y1 + ht * (a31 * k1.f1 + a32 * k2.f1));
      Deriv k4 = f(tau + c4 * ht,
                   y0 + ht * (a41 * k1.f0 + a42 * k2.f0 + a43 * k3.f0),
                   y1 + ht * (a41 * k1.f1 + a42 * k2.f1 + a43 * k3.f1));
      Deriv k5 = f(tau + c5 * ht,
                   y0 + ht * (a51 * k1.f0 + a52 * k2.f0 + a53 * k3.f0 + a54 * k4.f0),
                   y1 + ht * (a51 * k1.f1 + a52 * k2.f1 + a53 * k3.f1 + a54 * k4.f1));
      Deriv k6 = f(tau + ht,
                   y0 + ht * (a61 * k1.f0 + a62 * k2.f0 + a63 * k3.f0 +
                              a64 * k4.f0 + a65 * k5.f0),
                   y1 + ht * (a61 * k1.f1 + a62 * k2.f1 + a63 * k3.f1 +
                              a64 * k4.f1 + a65 * k5.f1));
      Complex u0 = y0 + ht * (b1 * k1.f0 + b3 * k3.f0 + b4 * k4.f0 +
                              b5 * k5.f0 + b6 * k6.f0);
      Complex u1 = y1 + ht * (b1 * k1.f1 + b3 * k3.f1 + b4 * k4.f1 +
                              b5 * k5.f1 + b6 * k6.f1);
      Deriv k7 = f(tau + ht, u0, u1);  // FSAL

      Complex ee0 = ht * (e1 * k1.f0 + e3 * k3.f0 + e4 * k4.f0 + e5 * k5.f0 +
                          e6 * k6.f0 + e7 * k7.f0);
      Complex ee1 = ht * (e1 * k1.f1 + e3 * k3.f1 + e4 * k4.f1 + e5 * k5.f1 +
                          e6 * k6.f1 + e7 * k7.f1);
      double sc0 = atol + rtol * std::max(std::abs(y0), std::abs(u0));
      double sc1 = atol + rtol * std::max(std::abs(y1), std::abs(u1));
      double err = std::sqrt(0.5 * (std::norm(ee0 / sc0) + std::norm(ee1 / sc1)));

      if (!std::isfinite(err) || !std::isfinite(std::abs(u0)) ||
          !std::isfinite(std::abs(u1))) {
        h = 0.2 * ht;
        continue;
      }

      if (err <= 1.0) {
        tau += ht;
        y0 = u0;
        y1 = u1;
        k1 = k7;
        double m = std::max(std::abs(y0), std::abs(y1));
        if (m > opt.rescale_threshold) {
          y0 /= m;
          y1 /= m;
          k1.f0 /= m;
          k1.f1 /= m;
          out.log_scale += std::log(m);
          ++out.rescales;
        }
        // PI controller (order-5 error exponent pair 0.7/5, 0.4/5)
        double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.14) *
                     std::pow(err_old, 0.08);
        h = ht * std::clamp(fac, 0.2, 5.0);
        err_old = std::max(err, 1e-4);
      } else {
        h = ht * std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
  }

  out.state = {contour.back(), y0, y1};
  return out;
}

// ---------------------------------------------------------------------------
// bracketed root finding

RootResult find_root_bracketed(const std::function<double(double)>& f,
                               double lo, double hi, double tol, int max_iter) {
  if (!(hi > lo))
    throw std::invalid_argument("find_root_bracketed: requires lo < hi");
  if (!(tol > 0.0))
    throw std::invalid_argument("find_root_bracketed: requires tol > 0");
  double a = lo, b = hi;
  double fa = f(a);
  if (fa == 0.0) return {a, 0.0, 0};
  double fb = f(b);
  if (fb == 0.0) return {b, 0.0, 0};
  if ((fa < 0.0) == (fb < 0.0))
    throw std::invalid_argument("find_root_bracketed: no sign change on [lo, hi]");

  int it = 0;
  int last_side = 0;  // +1 updated b, -1 updated a; repeated -> force bisection
  while (b - a > tol) {
    if (++it > max_iter)
      throw ConvergenceError("find_root_bracketed: exceeded max iterations");
    double w = b - a;
    double x = a + 0.5 * w;
    if (last_side != 2) {  // 2 marks "bisect next"
      double denom = fb - fa;
      if (denom != 0.0) {
        double xs = b - fb * w / denom;
        if (xs > a + 0.1 * w && xs < b - 0.1 * w) x = xs;
      }
    }
    double fx = f(x);
    if (fx == 0.0) return {x, 0.0, it};
    if ((fx < 0.0) == (fa < 0.0)) {
      a = x;
      fa = fx;
      last_side = last_side == -1 ? 2 : -1;
    } else {
      b = x;
      fb = fx;
      last_side = last_side == +1 ? 2 : +1;
    }
  }
  double root = a + 0.5 * (b - a);
  double fr = std::abs(fa) < std::abs(fb) ? fa : fb;
  return {root, fr, it};
}

// ---------------------------------------------------------------------------
// adaptive Gauss-Kronrod 7/15

namespace {

// QUADPACK dqk15 nodes and weights on [-1, 1].
const double kXgk[8] = {0.9914553711208126, 0.9491079123427585,
                        0.8648644233597691, 0.7415311855993944,
                        0.5860872354676911, 0.4058451513773972,
                        0.2077849550078985, 0.0};
const double kWgk[8] = {0.02293532201052922, 0.06309209262997855,
                        0.1047900103222502,  0.1406532597155259,
                        0.1690047266392679,  0.1903505780647854,
                        0.2044329400752989,  0.2094821410847278};
const double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                       0.3818300505051189, 0.4179591836734694};

struct Panel {
  double t0, t1;
  Complex val;  // Kronrod value in parameter space
  double err;   // |Kronrod - Gauss|
};

}  // namespace

Complex quad_complex_segment(const std::function<Complex(Complex)>& g,
                             Complex a, Complex b, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("quad_complex_segment: requires tol > 0");
  const Complex d = b - a;
  if (std::abs(d) == 0.0) return {0.0, 0.0};

  auto rule = [&](double t0, double t1) -> Panel {
    const double mid = 0.5 * (t0 + t1), hw = 0.5 * (t1 - t0);
    Complex resk = kWgk[7] * g(a + mid * d);
    Complex resg = kWg[3] * g(a + mid * d);
    for (int i = 0; i < 7; ++i) {
      Complex fl = g(a + (mid - hw * kXgk[i]) * d);
      Complex fr = g(a + (mid + hw * kXgk[i]) * d);
      resk += kWgk[i] * (fl + fr);
      if (i % 2 == 1) resg += kWg[i / 2] * (fl + fr);
    }
    resk *= hw;
    resg *= hw;
    return {t0, t1, resk, std::abs(resk - resg)};
  };

  std::vector<Panel> panels{rule(0.0, 1.0)};
  const double first = std::abs(d) * std::abs(panels[0].val);
  const double tol_t = tol * (1.0 + first) / std::abs(d);
  const std::size_t max_panels = 2000;

  auto total_err = [&]() {
    double e = 0.0;
    for (const Panel& p : panels) e += p.err;
    return e;
  };

  while (total_err() > tol_t && panels.size() < max_panels) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].err > panels[worst].err) worst = i;
    Panel p = panels[worst];
    if (p.t1 - p.t0 < 1e-15) break;  // cannot refine further
    double mid = 0.5 * (p.t0 + p.t1);
    panels[worst] = rule(p.t0, mid);
    panels.push_back(rule(mid, p.t1));
  }

  if (total_err() > 50.0 * tol_t)
    throw ConvergenceError("quad_complex_segment: integrand did not converge");

  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.t0 < y.t0; });
  Complex sum = 0.0;
  for (const Panel& p : panels) sum += p.val;
  return d * sum;
}

// ---------------------------------------------------------------------------
// thread pool helper

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(hw, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mx;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mx);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ptspec::num
