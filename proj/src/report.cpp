#include "ptspec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ptspec/wkb.hpp"

namespace ptspec::report {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<std::string> angle_as_pi_fraction(double angle) {
  if (!std::isfinite(angle)) return std::nullopt;
  double x = angle / kPi;
  // continued-fraction rational approximation with denominator <= 1000
  double y = x;
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(y);
    long a = long(fl);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > 1000) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = y - fl;
    if (frac < 1e-15) break;
    y = 1.0 / frac;
  }
  if (q1 < 1 || std::abs(x - double(p1) / double(q1)) > 1e-12) return std::nullopt;
  if (p1 == 0) return std::string("0");
  std::ostringstream os;
  if (q1 == 1) {
    if (p1 == 1) return std::string("pi");
    if (p1 == -1) return std::string("-pi");
    os << p1 << " pi";
    return os.str();
  }
  os << p1 << "/" << q1 << " pi";
  return os.str();
}

void validate(const RunConfig& cfg) {
  if (cfg.K < 1) throw std::invalid_argument("K: must be a positive integer");
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon: must be >= 0");
  if (cfg.format != "json" && cfg.format != "csv")
    throw std::invalid_argument("format: must be json or csv");
  if (!(cfg.tol.ode_rel > 0.0)) throw std::invalid_argument("ode_rel: must be > 0");
  if (!(cfg.tol.ode_abs > 0.0)) throw std::invalid_argument("ode_abs: must be > 0");
  if (!(cfg.tol.root_tol > 0.0)) throw std::invalid_argument("root_tol: must be > 0");
  if (!(cfg.tol.quad_tol > 0.0)) throw std::invalid_argument("quad_tol: must be > 0");
  if (cfg.subcommand == "spectrum" || cfg.subcommand == "compare") {
    if (cfg.n_max < 0) throw std::invalid_argument("n_max: must be >= 0");
    if (!(cfg.cutoff > 0.0)) throw std::invalid_argument("cutoff: must be > 0");
    if (cfg.method != "shooting" && cfg.method != "reflectionless" &&
        cfg.method != "wkb" && cfg.method != "all")
      throw std::invalid_argument(
          "method: must be shooting, reflectionless, wkb or all");
    if (cfg.method != "shooting" && cfg.epsilon != 2.0)
      throw std::invalid_argument(
          "method: reflectionless/wkb/all require epsilon = 2");
  } else if (cfg.subcommand == "reflection-scan") {
    if (cfg.epsilon != 2.0)
      throw std::invalid_argument("epsilon: reflection-scan requires epsilon = 2");
    if (!(cfg.e_min > 0.0)) throw std::invalid_argument("e_min: must be > 0");
    if (!(cfg.e_max > cfg.e_min))
      throw std::invalid_argument("e_max: must exceed e_min");
    if (cfg.e_steps < 2) throw std::invalid_argument("e_steps: must be >= 2");
  } else if (cfg.subcommand != "wedges") {
    throw std::invalid_argument("subcommand: unknown");
  }
  if (cfg.half_width < 0.0)
    throw std::invalid_argument("L: must be positive when given");
}

Report run_spectrum(const RunConfig& cfg) {
  validate(cfg);
  Report rep;
  rep.config = cfg;
  ProblemSpec spec(cfg.K, cfg.epsilon);

  std::map<int, SpectrumRow> rows;
  for (int n = 0; n <= cfg.n_max; ++n) rows[n].n = n;

  const bool want_shoot = cfg.method == "shooting" || cfg.method == "all";
  const bool want_refl = cfg.method == "reflectionless" || cfg.method == "all";
  const bool want_wkb = cfg.method == "wkb" || cfg.method == "all";

  if (want_shoot) {
    shooting::ShootingConfig scfg;
    scfg.cutoff_radius = cfg.cutoff;
    SpectrumOutcome oc = shooting::compute_spectrum_shooting(spec, cfg.n_max,
                                                             scfg, cfg.tol);
    for (const EnergyLevel& l : oc.levels) {
      rows[l.n].e_shooting = l.energy;
      rows[l.n].residual_shooting = l.residual;
    }
    for (const LevelFailure& f : oc.failures)
      rep.errors.push_back({f.n, "shooting", f.message});
  }
  if (want_refl) {
    reflection::ReflectionConfig rcfg;
    rcfg.half_width = cfg.half_width;
    SpectrumOutcome oc = reflection::compute_spectrum_reflectionless(
        spec, cfg.n_max, rcfg, cfg.tol);
    for (const EnergyLevel& l : oc.levels) {
      rows[l.n].e_reflectionless = l.energy;
      rows[l.n].residual_reflectionless = l.residual;
    }
    for (const LevelFailure& f : oc.failures)
      rep.errors.push_back({f.n, "reflectionless", f.message});
  }
  if (want_wkb) {
    for (int n = 0; n <= cfg.n_max; ++n)
      rows[n].e_wkb = wkb::closed_form_energy(spec, n);
  }

  for (auto& [n, row] : rows) {
    if (row.e_shooting && *row.e_shooting != 0.0) {
      if (row.e_reflectionless)
        row.dev_shoot_refl =
            std::abs(*row.e_shooting - *row.e_reflectionless) / *row.e_shooting;
      if (row.e_wkb)
        row.dev_shoot_wkb = std::abs(*row.e_shooting - *row.e_wkb) / *row.e_shooting;
    }
    rep.spectrum_rows.push_back(row);
  }
  return rep;
}

Report run_reflection_scan(const RunConfig& cfg) {
  validate(cfg);
  Report rep;
  rep.config = cfg;
  ProblemSpec spec(cfg.K, cfg.epsilon);

  const double inv_deg = 1.0 / (2.0 * cfg.K + 2.0);
  const double L = cfg.half_width > 0.0
                       ? cfg.half_width
                       : std::max(8.0, 4.0 * std::pow(cfg.e_max, inv_deg));

  rep.scan_rows.resize(cfg.e_steps);
  std::vector<std::optional<ReportError>> errs(cfg.e_steps);
  num::parallel_for(std::size_t(cfg.e_steps), [&](std::size_t i) {
    double E = cfg.e_min +
               (cfg.e_max - cfg.e_min) * double(i) / double(cfg.e_steps - 1);
    try {
      reflection::ScatteringResult sc =
          reflection::reflection_amplitude(spec, E, L, cfg.tol);
      rep.scan_rows[i] = {E, std::abs(sc.r), std::arg(sc.r), std::abs(sc.t),
                          sc.flux_error};
    } catch (const std::exception& e) {
      rep.scan_rows[i] = {E, std::nan(""), std::nan(""), std::nan(""), std::nan("")};
      errs[i] = ReportError{int(i), "reflection-scan", e.what()};
    }
  });
  for (auto& e : errs)
    if (e.has_value()) rep.errors.push_back(*e);
  return rep;
}

Report run_wedges(const RunConfig& cfg) {
  validate(cfg);
  Report rep;
  rep.config = cfg;
  ProblemSpec spec(cfg.K, cfg.epsilon);
  rep.geometry = wedge_geometry(spec);
  auto roles = classify_roles(spec);
  rep.roles.assign(roles.begin(), roles.end());
  if (spec.reflectionless_case())
    rep.turning_points_at_unit_energy = turning_points(spec, 1.0);
  return rep;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

const char* branch_name(Branch b) { return b == Branch::plus ? "plus" : "minus"; }
const char* wedge_name(Wedge w) { return w == Wedge::right ? "right" : "left"; }
const char* behavior_name(Behavior b) {
  return b == Behavior::decays ? "decays" : "grows";
}
const char* travel_name(Travel t) {
  return t == Travel::rightward ? "rightward" : "leftward";
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string opt_num(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : "null";
}

std::string angle_entry(double v) {
  std::string out = "{\"radians\": " + format_double(v) + ", \"as_pi\": ";
  auto frac = angle_as_pi_fraction(v);
  out += frac.has_value() ? "\"" + *frac + "\"" : "null";
  out += "}";
  return out;
}

void append_config(std::ostringstream& os, const RunConfig& c) {
  os << "\"config\": {\"subcommand\": \"" << c.subcommand << "\", \"K\": " << c.K
     << ", \"epsilon\": " << format_double(c.epsilon) << ", \"n_max\": " << c.n_max
     << ", \"method\": \"" << c.method << "\", \"cutoff\": " << format_double(c.cutoff)
     << ", \"L\": " << format_double(c.half_width)
     << ", \"e_min\": " << format_double(c.e_min)
     << ", \"e_max\": " << format_double(c.e_max) << ", \"e_steps\": " << c.e_steps
     << ", \"format\": \"" << c.format << "\", \"tolerances\": {\"ode_rel\": "
     << format_double(c.tol.ode_rel) << ", \"ode_abs\": " << format_double(c.tol.ode_abs)
     << ", \"root_tol\": " << format_double(c.tol.root_tol)
     << ", \"quad_tol\": " << format_double(c.tol.quad_tol) << "}}";
}

void append_errors(std::ostringstream& os, const std::vector<ReportError>& errors) {
  os << "\"errors\": [";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) os << ", ";
    os << "{\"n\": " << errors[i].n << ", \"method\": \"" << errors[i].method
       << "\", \"message\": \"" << json_escape(errors[i].message) << "\"}";
  }
  os << "]";
}

}  // namespace

std::string to_json(const Report& rep) {
  std::ostringstream os;
  os << "{\"version\": \"1\", ";
  append_config(os, rep.config);
  os << ", ";

  if (rep.config.subcommand == "wedges") {
    const WedgeGeometry& g = *rep.geometry;
    os << "\"geometry\": {";
    os << "\"centre_right\": " << angle_entry(g.centre_right);
    os << ", \"centre_left\": " << angle_entry(g.centre_left);
    os << ", \"opening\": " << angle_entry(g.opening);
    os << ", \"upper_edge_right\": " << angle_entry(g.upper_edge_right);
    os << ", \"lower_edge_right\": " << angle_entry(g.lower_edge_right);
    os << ", \"upper_edge_left\": " << angle_entry(g.upper_edge_left);
    os << ", \"lower_edge_left\": " << angle_entry(g.lower_edge_left);
    os << "}, \"roles\": [";
    for (std::size_t i = 0; i < rep.roles.size(); ++i) {
      const SolutionRole& r = rep.roles[i];
      if (i) os << ", ";
      os << "{\"branch\": \"" << branch_name(r.branch) << "\", \"wedge\": \""
         << wedge_name(r.wedge) << "\", \"behavior\": \""
         << behavior_name(r.behavior) << "\", \"travel\": ";
      if (r.travel.has_value())
        os << "\"" << travel_name(*r.travel) << "\"";
      else
        os << "null";
      os << "}";
    }
    os << "], \"turning_points\": ";
    if (rep.turning_points_at_unit_energy.has_value()) {
      const TurningPoints& tp = *rep.turning_points_at_unit_energy;
      os << "{\"energy\": 1, \"right\": [" << format_double(tp.right.real())
         << ", " << format_double(tp.right.imag()) << "], \"left\": ["
         << format_double(tp.left.real()) << ", " << format_double(tp.left.imag())
         << "]}";
    } else {
      os << "null";
    }
    os << ", ";
  } else if (rep.config.subcommand == "reflection-scan") {
    os << "\"rows\": [";
    for (std::size_t i = 0; i < rep.scan_rows.size(); ++i) {
      const ScanRow& r = rep.scan_rows[i];
      if (i) os << ", ";
      auto num = [](double v) {
        return std::isfinite(v) ? format_double(v) : std::string("null");
      };
      os << "{\"energy\": " << format_double(r.energy) << ", \"r_abs\": "
         << num(r.r_abs) << ", \"r_arg\": " << num(r.r_arg) << ", \"t_abs\": "
         << num(r.t_abs) << ", \"flux_error\": " << num(r.flux_error) << "}";
    }
    os << "], ";
  } else {
    os << "\"rows\": [";
    for (std::size_t i = 0; i < rep.spectrum_rows.size(); ++i) {
      const SpectrumRow& r = rep.spectrum_rows[i];
      if (i) os << ", ";
      os << "{\"n\": " << r.n << ", \"e_shooting\": " << opt_num(r.e_shooting)
         << ", \"e_reflectionless\": " << opt_num(r.e_reflectionless)
         << ", \"e_wkb\": " << opt_num(r.e_wkb)
         << ", \"dev_shoot_refl\": " << opt_num(r.dev_shoot_refl)
         << ", \"dev_shoot_wkb\": " << opt_num(r.dev_shoot_wkb)
         << ", \"residual_shooting\": " << opt_num(r.residual_shooting)
         << ", \"residual_reflectionless\": " << opt_num(r.residual_reflectionless)
         << "}";
    }
    os << "], ";
  }

  append_errors(os, rep.errors);
  os << "}\n";
  return os.str();
}

std::string to_csv(const Report& rep) {
  std::ostringstream os;
  auto cell = [](const std::optional<double>& v) {
    return v.has_value() ? format_double(*v) : std::string();
  };

  if (rep.config.subcommand == "wedges") {
    os << "quantity,value,as_pi\n";
    const WedgeGeometry& g = *rep.geometry;
    auto row = [&](const char* name, double v) {
      auto frac = angle_as_pi_fraction(v);
      os << name << "," << format_double(v) << ","
         << (frac.has_value() ? *frac : std::string()) << "\n";
    };
    row("centre_right", g.centre_right);
    row("centre_left", g.centre_left);
    row("opening", g.opening);
    row("upper_edge_right", g.upper_edge_right);
    row("lower_edge_right", g.lower_edge_right);
    row("upper_edge_left", g.upper_edge_left);
    row("lower_edge_left", g.lower_edge_left);
    for (const SolutionRole& r : rep.roles) {
      os << "role_" << branch_name(r.branch) << "_" << wedge_name(r.wedge) << ","
         << behavior_name(r.behavior) << ","
         << (r.travel.has_value() ? travel_name(*r.travel) : "") << "\n";
    }
  } else if (rep.config.subcommand == "reflection-scan") {
    os << "energy,r_abs,r_arg,t_abs,flux_error\n";
    for (const ScanRow& r : rep.scan_rows) {
      auto num = [](double v) {
        return std::isfinite(v) ? format_double(v) : std::string();
      };
      os << format_double(r.energy) << "," << num(r.r_abs) << "," << num(r.r_arg)
         << "," << num(r.t_abs) << "," << num(r.flux_error) << "\n";
    }
  } else {
    os << "n,e_shooting,e_reflectionless,e_wkb,dev_shoot_refl,dev_shoot_wkb,"
          "residual_shooting,residual_reflectionless\n";
    for (const SpectrumRow& r : rep.spectrum_rows) {
      os << r.n << "," << cell(r.e_shooting) << "," << cell(r.e_reflectionless)
         << "," << cell(r.e_wkb) << "," << cell(r.dev_shoot_refl) << ","
         << cell(r.dev_shoot_wkb) << "," << cell(r.residual_shooting) << ","
         << cell(r.residual_reflectionless) << "\n";
    }
  }
  for (const ReportError& e : rep.errors)
    os << "# error: n=" << e.n << " method=" << e.method << " " << e.message
       << "\n";
  return os.str();
}

}  // namespace ptspec::report
