#include "ptspec/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "ptspec/wkb.hpp"

namespace ptspec::shooting {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

num::OdeState boundary_state(const ProblemSpec& spec, Wedge wedge, double cutoff) {
  double M = spec.exponent_order();
  if (!(cutoff > 0.0) || !(std::pow(cutoff, M) / M > 25.0))
    throw std::invalid_argument(
        "cutoff_radius: too small for asymptotic boundary data (needs R^M / M > 25)");
  WedgeGeometry geo = wedge_geometry(spec);
  double theta = wedge == Wedge::right ? geo.centre_right : geo.centre_left;
  Complex x0 = std::polar(cutoff, theta);
  Branch decaying = Branch::minus;
  for (const SolutionRole& role : classify_roles(spec))
    if (role.wedge == wedge && role.behavior == Behavior::decays)
      decaying = role.branch;
  double s = decaying == Branch::plus ? 1.0 : -1.0;
  // leading log-derivative of exp(s i^{eps/2} x^M / M)
  Complex dpsi = s * std::polar(1.0, kPi * spec.epsilon / 4.0) *
                 pow_cut_plane(x0, M - 1.0);
  return {x0, Complex(1.0, 0.0), dpsi};
}

WronskianMismatch wronskian_mismatch(const ProblemSpec& spec, double E,
                                     const ShootingConfig& cfg,
                                     const num::Tolerances& tol) {
  if (cfg.matching_point.real() != 0.0 || !(cfg.matching_point.imag() < 0.0))
    throw std::invalid_argument(
        "matching_point: must lie on the negative imaginary axis");
  // the E-independent boundary data assume |V| >> E at the cutoff
  double ceiling =
      0.5 * std::pow(cfg.cutoff_radius, 2.0 * spec.K + spec.epsilon);
  if (!(std::abs(E) < ceiling)) {
    std::ostringstream os;
    os.precision(6);
    os << "cutoff_radius: E = " << E << " exceeds the validity ceiling "
       << ceiling << " of the asymptotic boundary data; increase cutoff_radius";
    throw std::invalid_argument(os.str());
  }
  auto rhs = schroedinger_rhs(spec, E);
  num::OdeOptions opt;
  opt.tol = tol;

  num::OdeState bR = boundary_state(spec, Wedge::right, cfg.cutoff_radius);
  num::OdeState bL = boundary_state(spec, Wedge::left, cfg.cutoff_radius);
  num::OdeResult right = num::integrate_ode(
      rhs, {bR.position, cfg.matching_point}, bR.psi, bR.dpsi, opt);
  num::OdeResult left = num::integrate_ode(
      rhs, {bL.position, cfg.matching_point}, bL.psi, bL.dpsi, opt);

  // Both solutions carry their own e^{log_scale}; the residual below is
  // invariant under those common factors.
  Complex w = left.state.psi * right.state.dpsi -
              right.state.psi * left.state.dpsi;
  double denom = std::abs(left.state.psi * right.state.dpsi) +
                 std::abs(right.state.psi * left.state.dpsi);
  if (denom == 0.0)
    throw num::ConvergenceError("wronskian_mismatch: both solutions vanished");
  return {w / denom, left.log_scale, right.log_scale, left.steps + right.steps};
}

namespace {

struct Bracket {
  double lo = 0.0, hi = 0.0;
};

std::string grid_string(const std::vector<double>& xs, const std::vector<double>& fs) {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << (i ? ", " : "") << "(" << xs[i] << ": " << fs[i] << ")";
  return os.str();
}

// Residual signs over a grid, evaluated in parallel.
std::vector<double> evaluate_grid(const ProblemSpec& spec,
                                  const std::vector<double>& energies,
                                  const ShootingConfig& cfg,
                                  const num::Tolerances& tol) {
  std::vector<double> fs(energies.size());
  num::parallel_for(energies.size(), [&](std::size_t i) {
    fs[i] = wronskian_mismatch(spec, energies[i], cfg, tol).value.real();
  });
  return fs;
}

bool sign_flip(double f0, double f1) { return (f0 < 0.0) != (f1 < 0.0); }

// Brackets for eps = 2 from the WKB ladder; each bracket is narrowed to an
// actual sign change of the residual.
std::vector<std::optional<Bracket>> wkb_seeded_brackets(
    const ProblemSpec& spec, int n_max, const ShootingConfig& cfg,
    const num::Tolerances& tol, std::vector<LevelFailure>& failures) {
  auto seeds = wkb::energy_brackets(spec, n_max, 0.4);
  std::vector<std::optional<Bracket>> out(n_max + 1);
  for (const auto& seed : seeds) {
    bool found = false;
    for (int m : {1, 8, 32}) {
      std::vector<double> xs(m + 1);
      for (int i = 0; i <= m; ++i)
        xs[i] = seed.lo + (seed.hi - seed.lo) * double(i) / m;
      std::vector<double> fs = evaluate_grid(spec, xs, cfg, tol);
      for (int i = 0; i < m; ++i) {
        if (sign_flip(fs[i], fs[i + 1])) {
          out[seed.n] = Bracket{xs[i], xs[i + 1]};
          found = true;
          break;
        }
      }
      if (found) break;
      if (m == 32)
        failures.push_back(
            {seed.n, "no Wronskian sign change inside the WKB bracket; grid: " +
                         grid_string(xs, fs)});
    }
  }
  return out;
}

// Geometric ladder scan with midpoint refinement for eps != 2.
std::vector<std::optional<Bracket>> ladder_brackets(
    const ProblemSpec& spec, int n_max, const ShootingConfig& cfg,
    const num::Tolerances& tol, std::vector<LevelFailure>& failures) {
  if (!(cfg.scan_start > 0.0) || !(cfg.scan_ratio > 1.0))
    throw std::invalid_argument("scan_start/scan_ratio: need scan_start > 0, scan_ratio > 1");
  const int needed = n_max + 1;
  std::vector<double> xs;
  std::vector<double> fs;

  auto count_flips = [&]() {
    int c = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (sign_flip(fs[i], fs[i + 1])) ++c;
    return c;
  };

  // grow the ladder until enough eigenvalues are straddled; never walk past
  // the energy where the cutoff's boundary data stop being asymptotic
  const double ceiling =
      0.5 * std::pow(cfg.cutoff_radius, 2.0 * spec.K + spec.epsilon);
  int j = 0;
  const int max_points = 96;
  bool capped = false;
  while (count_flips() < needed && int(xs.size()) < max_points && !capped) {
    std::vector<double> fresh;
    for (int k = 0; k < 8; ++k) {
      double e = cfg.scan_start * std::pow(cfg.scan_ratio, j++);
      if (!(e < ceiling)) {
        capped = true;
        break;
      }
      fresh.push_back(e);
    }
    if (fresh.empty()) break;
    std::vector<double> ffresh = evaluate_grid(spec, fresh, cfg, tol);
    xs.insert(xs.end(), fresh.begin(), fresh.end());
    fs.insert(fs.end(), ffresh.begin(), ffresh.end());
  }

  // midpoint refinement: a coarse ladder can hide an even number of roots
  // inside one interval; refine until the count stabilizes
  for (int round = 0; round < cfg.scan_refine_rounds; ++round) {
    int before = count_flips();
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      mids.push_back(0.5 * (xs[i] + xs[i + 1]));
    std::vector<double> fmids = evaluate_grid(spec, mids, cfg, tol);
    std::vector<double> nxs, nfs;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      nxs.push_back(xs[i]);
      nfs.push_back(fs[i]);
      if (i < mids.size()) {
        nxs.push_back(mids[i]);
        nfs.push_back(fmids[i]);
      }
    }
    xs.swap(nxs);
    fs.swap(nfs);
    if (count_flips() == before && before >= needed) break;
  }

  std::vector<std::optional<Bracket>> out(needed);
  int found = 0;
  for (std::size_t i = 0; i + 1 < xs.size() && found < needed; ++i)
    if (sign_flip(fs[i], fs[i + 1])) out[found++] = Bracket{xs[i], xs[i + 1]};
  for (int n = found; n < needed; ++n) {
    std::ostringstream os;
    os << "scan isolated only " << found << " sign changes";
    if (capped)
      os << " below the cutoff validity ceiling E < " << ceiling
         << " (increase cutoff_radius)";
    os << "; grid: " << grid_string(xs, fs);
    failures.push_back({n, os.str()});
  }
  return out;
}

}  // namespace

SpectrumOutcome compute_spectrum_shooting(const ProblemSpec& spec, int n_max,
                                          const ShootingConfig& cfg,
                                          const num::Tolerances& tol) {
  if (n_max < 0)
    throw std::invalid_argument("n_max: must be >= 0");

  SpectrumOutcome outcome;
  std::vector<std::optional<Bracket>> brackets =
      spec.reflectionless_case()
          ? wkb_seeded_brackets(spec, n_max, cfg, tol, outcome.failures)
          : ladder_brackets(spec, n_max, cfg, tol, outcome.failures);

  std::vector<std::optional<EnergyLevel>> levels(n_max + 1);
  std::vector<std::optional<LevelFailure>> level_failures(n_max + 1);

  num::parallel_for(std::size_t(n_max) + 1, [&](std::size_t n) {
    if (!brackets[n].has_value()) return;
    const Bracket br = *brackets[n];
    auto residual_at = [&](double cutoff) {
      return [&, cutoff](double E) {
        ShootingConfig c = cfg;
        c.cutoff_radius = cutoff;
        return wronskian_mismatch(spec, E, c, tol).value.real();
      };
    };
    try {
      num::RootResult first =
          num::find_root_bracketed(residual_at(cfg.cutoff_radius), br.lo, br.hi,
                                   tol.root_tol);
      // convergence recheck: double the cutoff, re-solve near the root
      auto f2 = residual_at(2.0 * cfg.cutoff_radius);
      double w = std::max(100.0 * tol.root_tol, 1e-9 * std::abs(first.root));
      num::RootResult second{};
      bool rebracketed = false;
      for (int attempt = 0; attempt < 5; ++attempt) {
        double lo = first.root - w, hi = first.root + w;
        double flo = f2(lo), fhi = f2(hi);
        if ((flo < 0.0) != (fhi < 0.0)) {
          second = num::find_root_bracketed(f2, lo, hi, tol.root_tol);
          rebracketed = true;
          break;
        }
        w *= 8.0;
      }
      if (!rebracketed) {
        level_failures[n] = LevelFailure{
            int(n), "recheck at doubled cutoff found no nearby sign change"};
        return;
      }
      double shift = std::abs(second.root - first.root);
      // the root is only defined to (residual noise)/(residual slope); deep
      // in the spectrum the transport noise grows and a fixed gate would
      // reject levels whose intrinsic uncertainty exceeds root_tol
      double h = 1e-4 * std::max(1.0, std::abs(second.root));
      double slope =
          std::abs(f2(second.root + h) - f2(second.root - h)) / (2.0 * h);
      double sigma =
          std::max(std::abs(first.f_root), std::abs(second.f_root));
      double gate = 10.0 * tol.root_tol;
      if (slope > 0.0)
        gate = std::min(std::max(gate, 10.0 * sigma / slope),
                        1e-3 * (br.hi - br.lo));
      if (shift > gate) {
        std::ostringstream os;
        os.precision(12);
        os << "energy not converged in cutoff: moved by " << shift
           << " when the cutoff was doubled";
        level_failures[n] = LevelFailure{int(n), os.str()};
        return;
      }
      EnergyLevel lvl;
      lvl.n = int(n);
      lvl.energy = second.root;
      lvl.residual = std::abs(second.f_root);
      lvl.recheck_shift = shift;
      lvl.method = "shooting";
      levels[n] = lvl;
    } catch (const std::exception& e) {
      level_failures[n] = LevelFailure{int(n), e.what()};
    }
  });

  for (int n = 0; n <= n_max; ++n) {
    if (levels[n].has_value()) outcome.levels.push_back(*levels[n]);
    if (level_failures[n].has_value()) outcome.failures.push_back(*level_failures[n]);
  }
  return outcome;
}

}  // namespace ptspec::shooting
