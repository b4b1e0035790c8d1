#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptspec/numerics.hpp"
#include "ptspec/problem.hpp"
#include "ptspec/reflection.hpp"
#include "ptspec/shooting.hpp"

// Report assembly and serialization for the CLI: runs the requested
// computation, collects rows and per-level errors, and renders them as JSON or
// CSV. All floating-point fields are written with 17 significant digits so a
// round trip through text reproduces the exact doubles.

namespace ptspec::report {

struct RunConfig {
  std::string subcommand;  // spectrum | reflection-scan | wedges | compare
  int K = 1;
  double epsilon = 2.0;
  int n_max = 5;
  std::string method = "shooting";  // shooting | reflectionless | wkb | all
  double cutoff = 8.0;
  double half_width = 0.0;  // 0 = auto
  double e_min = 0.0;
  double e_max = 0.0;
  int e_steps = 0;
  std::string format = "json";  // json | csv
  std::string out_path;         // empty = stdout
  num::Tolerances tol;
};

// Throws std::invalid_argument naming the offending field.
void validate(const RunConfig& cfg);

struct SpectrumRow {
  int n = 0;
  std::optional<double> e_shooting;
  std::optional<double> e_reflectionless;
  std::optional<double> e_wkb;
  std::optional<double> dev_shoot_refl;  // |Es - Er| / Es
  std::optional<double> dev_shoot_wkb;   // |Es - Ew| / Es
  std::optional<double> residual_shooting;
  std::optional<double> residual_reflectionless;
};

struct ScanRow {
  double energy = 0.0;
  double r_abs = 0.0;
  double r_arg = 0.0;
  double t_abs = 0.0;
  double flux_error = 0.0;
};

struct ReportError {
  int n = -1;
  std::string method;
  std::string message;
};

struct Report {
  RunConfig config;
  std::vector<SpectrumRow> spectrum_rows;
  std::vector<ScanRow> scan_rows;
  // wedges payload (only for the wedges subcommand)
  std::optional<WedgeGeometry> geometry;
  std::vector<SolutionRole> roles;
  std::optional<TurningPoints> turning_points_at_unit_energy;
  std::vector<ReportError> errors;
};

Report run_spectrum(const RunConfig& cfg);
Report run_reflection_scan(const RunConfig& cfg);
Report run_wedges(const RunConfig& cfg);

std::string to_json(const Report& rep);
std::string to_csv(const Report& rep);

// Exact rational multiple of pi as "p/q pi" ("0" for zero, "pi"/"-pi" for
// q = 1), denominators up to 1000; nullopt when the angle is not such a
// multiple to within 1e-12.
std::optional<std::string> angle_as_pi_fraction(double angle);

// %.17g rendering used for every double in the reports.
std::string format_double(double v);

}  // namespace ptspec::report
