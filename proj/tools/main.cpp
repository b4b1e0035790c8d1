#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ptspec/report.hpp"

// Command line front end. Exit codes: 0 success, 1 configuration error
// (message names the offending field), 2 when individual levels or scan
// points failed but the report was still produced.

namespace {

using ptspec::report::Report;
using ptspec::report::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--K", cfg.K, "prefactor exponent K in x^{2K}")->required();
  sub->add_option("--epsilon", cfg.epsilon, "deformation exponent of (ix)^epsilon")
      ->required();
  sub->add_option("--format", cfg.format, "output format: json or csv");
  sub->add_option("--out", cfg.out_path, "write the report to this file");
  sub->add_option("--ode-rel", cfg.tol.ode_rel, "ODE relative tolerance");
  sub->add_option("--ode-abs", cfg.tol.ode_abs, "ODE absolute tolerance");
  sub->add_option("--root-tol", cfg.tol.root_tol, "root finder energy tolerance");
  sub->add_option("--quad-tol", cfg.tol.quad_tol, "quadrature tolerance");
}

int emit(const Report& rep) {
  std::string text = rep.config.format == "csv" ? ptspec::report::to_csv(rep)
                                                : ptspec::report::to_json(rep);
  if (rep.config.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(rep.config.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "out: cannot open '" << rep.config.out_path << "' for writing\n";
      return 1;
    }
    out << text;
  }
  for (const auto& e : rep.errors)
    std::cerr << "error: n=" << e.n << " method=" << e.method << ": " << e.message
              << "\n";
  return rep.errors.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of the PT-symmetric oscillators H = p^2 + x^{2K}(ix)^epsilon"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "eigenvalues by shooting / reflection zeros / WKB");
  add_common(spectrum, cfg);
  spectrum->add_option("--n-max", cfg.n_max, "highest level");
  spectrum->add_option("--method", cfg.method,
                       "shooting, reflectionless, wkb or all");
  spectrum->add_option("--cutoff", cfg.cutoff, "shooting cutoff radius");
  spectrum->add_option("--L", cfg.half_width,
                       "reflection half-width (0 = automatic)");

  CLI::App* compare = app.add_subcommand(
      "compare", "all methods side by side with relative deviations");
  add_common(compare, cfg);
  compare->add_option("--n-max", cfg.n_max, "highest level");
  compare->add_option("--cutoff", cfg.cutoff, "shooting cutoff radius");
  compare->add_option("--L", cfg.half_width,
                      "reflection half-width (0 = automatic)");

  CLI::App* scan = app.add_subcommand(
      "reflection-scan", "|r|, arg r, |t| and flux error over an energy grid");
  add_common(scan, cfg);
  scan->add_option("--e-min", cfg.e_min, "lowest energy")->required();
  scan->add_option("--e-max", cfg.e_max, "highest energy")->required();
  scan->add_option("--e-steps", cfg.e_steps, "number of grid points")->required();
  scan->add_option("--L", cfg.half_width,
                   "scattering half-width (0 = automatic)");

  CLI::App* wedges = app.add_subcommand(
      "wedges", "wedge geometry, solution roles and turning points");
  add_common(wedges, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    Report rep;
    if (spectrum->parsed()) {
      cfg.subcommand = "spectrum";
      rep = ptspec::report::run_spectrum(cfg);
    } else if (compare->parsed()) {
      cfg.subcommand = "compare";
      cfg.method = "all";
      rep = ptspec::report::run_spectrum(cfg);
    } else if (scan->parsed()) {
      cfg.subcommand = "reflection-scan";
      rep = ptspec::report::run_reflection_scan(cfg);
    } else {
      cfg.subcommand = "wedges";
      rep = ptspec::report::run_wedges(cfg);
    }
    return emit(rep);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
