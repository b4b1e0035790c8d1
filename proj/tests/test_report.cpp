#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <string>

#include "ptspec/report.hpp"
#include "ptspec/wkb.hpp"

using namespace ptspec;
using nlohmann::json;

namespace {
constexpr double kPi = 3.14159265358979323846;

bool throws_naming(const report::RunConfig& cfg, const std::string& field) {
  try {
    report::validate(cfg);
  } catch (const std::invalid_argument& e) {
    return std::string(e.what()).rfind(field + ":", 0) == 0;
  }
  return false;
}
}  // namespace

TEST_CASE("format_double round-trips every double") {
  for (double v : {1.0 / 3.0, 1e300, 0.1, 6.02214076e23, 1.477149754,
                   kPi, -7.25e-12}) {
    CAPTURE(v);
    double back = std::strtod(report::format_double(v).c_str(), nullptr);
    CHECK(back == v);
  }
  std::string neg_zero = report::format_double(-0.0);
  CHECK(neg_zero == "-0");
  CHECK(std::signbit(std::strtod(neg_zero.c_str(), nullptr)));
}

TEST_CASE("angle_as_pi_fraction recognizes rational multiples") {
  using report::angle_as_pi_fraction;
  CHECK(angle_as_pi_fraction(0.0) == "0");
  CHECK(angle_as_pi_fraction(kPi) == "pi");
  CHECK(angle_as_pi_fraction(-kPi) == "-pi");
  CHECK(angle_as_pi_fraction(-kPi / 6.0) == "-1/6 pi");
  CHECK(angle_as_pi_fraction(0.75 * kPi) == "3/4 pi");
  CHECK(angle_as_pi_fraction(2.0 * kPi) == "2 pi");
  CHECK(angle_as_pi_fraction(kPi / 1000.0) == "1/1000 pi");
  CHECK(!angle_as_pi_fraction(kPi / 1001.0).has_value());
  CHECK(!angle_as_pi_fraction(1.0).has_value());
  CHECK(!angle_as_pi_fraction(std::nan("")).has_value());
}

TEST_CASE("wedges report carries the full geometry payload") {
  report::RunConfig cfg;
  cfg.subcommand = "wedges";
  cfg.K = 1;
  cfg.epsilon = 2.0;
  report::Report rep = report::run_wedges(cfg);
  json j = json::parse(report::to_json(rep));

  CHECK(j["version"] == "1");
  CHECK(j["config"]["K"] == 1);
  CHECK(j["config"]["subcommand"] == "wedges");
  CHECK(j["config"]["tolerances"]["ode_rel"].get<double>() == 1e-10);

  auto& g = j["geometry"];
  CHECK(g["upper_edge_right"]["radians"].get<double>() == 0.0);
  CHECK(g["upper_edge_right"]["as_pi"] == "0");
  CHECK(g["upper_edge_left"]["radians"].get<double>() == -kPi);
  CHECK(g["upper_edge_left"]["as_pi"] == "-pi");
  CHECK(g["centre_right"]["as_pi"] == "-1/6 pi");
  CHECK(g["opening"]["as_pi"] == "1/3 pi");

  auto& roles = j["roles"];
  REQUIRE(roles.size() == 4);
  bool saw_decaying_right_minus = false;
  for (auto& r : roles) {
    if (r["wedge"] == "right" && r["branch"] == "minus") {
      CHECK(r["behavior"] == "decays");
      CHECK(r["travel"].is_string());
      saw_decaying_right_minus = true;
    }
  }
  CHECK(saw_decaying_right_minus);

  auto& tp = j["turning_points"];
  REQUIRE(!tp.is_null());
  CHECK(tp["energy"] == 1);
  double c = std::sqrt(0.5);
  CHECK(tp["right"][0].get<double>() == doctest::Approx(c).epsilon(1e-15));
  CHECK(tp["right"][1].get<double>() == doctest::Approx(-c).epsilon(1e-15));
  CHECK(tp["left"][0].get<double>() == doctest::Approx(-c).epsilon(1e-15));
}

TEST_CASE("wedges report for generic epsilon has no travel or turning points") {
  report::RunConfig cfg;
  cfg.subcommand = "wedges";
  cfg.K = 1;
  cfg.epsilon = 1.0;
  json j = json::parse(report::to_json(report::run_wedges(cfg)));
  CHECK(j["turning_points"].is_null());
  for (auto& r : j["roles"]) CHECK(r["travel"].is_null());
}

TEST_CASE("wkb-only spectrum rows round-trip bit for bit") {
  report::RunConfig cfg;
  cfg.subcommand = "spectrum";
  cfg.method = "wkb";
  cfg.K = 2;
  cfg.n_max = 3;
  report::Report rep = report::run_spectrum(cfg);
  json j = json::parse(report::to_json(rep));

  auto& rows = j["rows"];
  REQUIRE(rows.size() == 4);
  ProblemSpec s(2, 2.0);
  for (int n = 0; n <= 3; ++n) {
    CAPTURE(n);
    CHECK(rows[n]["n"] == n);
    CHECK(rows[n]["e_wkb"].get<double>() == wkb::closed_form_energy(s, n));
    CHECK(rows[n]["e_shooting"].is_null());
    CHECK(rows[n]["dev_shoot_wkb"].is_null());
    CHECK(rows[n]["residual_shooting"].is_null());
  }
  CHECK(j["errors"].empty());
}

TEST_CASE("spectrum CSV uses the pinned header and empty cells") {
  report::RunConfig cfg;
  cfg.subcommand = "spectrum";
  cfg.method = "wkb";
  cfg.K = 1;
  cfg.n_max = 1;
  cfg.format = "csv";
  std::string csv = report::to_csv(report::run_spectrum(cfg));
  CHECK(csv.rfind("n,e_shooting,e_reflectionless,e_wkb,dev_shoot_refl,"
                  "dev_shoot_wkb,residual_shooting,residual_reflectionless\n",
                  0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  // second line: n = 0, three empty cells, then the wkb value
  auto line_start = csv.find('\n') + 1;
  auto line = csv.substr(line_start, csv.find('\n', line_start) - line_start);
  CHECK(line.rfind("0,,,", 0) == 0);
  CHECK(std::count(line.begin(), line.end(), ',') == 7);
  CHECK(line.substr(line.size() - 4) == ",,,,");
}

TEST_CASE("reflection scan reports rows and per-point failures") {
  report::RunConfig cfg;
  cfg.subcommand = "reflection-scan";
  cfg.K = 1;
  cfg.epsilon = 2.0;
  cfg.e_min = 1.0;
  cfg.e_max = 1.0e6;  // far beyond the fixed window: the last point must fail
  cfg.e_steps = 2;
  cfg.half_width = 8.0;
  report::Report rep = report::run_reflection_scan(cfg);
  json j = json::parse(report::to_json(rep));

  auto& rows = j["rows"];
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["energy"].get<double>() == 1.0);
  CHECK(rows[0]["r_abs"].get<double>() > 0.0);
  CHECK(rows[0]["flux_error"].get<double>() < 1e-4);
  CHECK(rows[1]["r_abs"].is_null());
  REQUIRE(j["errors"].size() == 1);
  CHECK(j["errors"][0]["method"] == "reflection-scan");

  cfg.format = "csv";
  std::string csv = report::to_csv(rep);
  CHECK(csv.rfind("energy,r_abs,r_arg,t_abs,flux_error\n", 0) == 0);
  CHECK(csv.find("1000000,,,,\n") != std::string::npos);
  CHECK(csv.find("# error: n=1 method=reflection-scan") != std::string::npos);
}

TEST_CASE("validate names the offending field") {
  report::RunConfig good;
  good.subcommand = "spectrum";
  CHECK_NOTHROW(report::validate(good));

  auto bad = good;
  bad.K = 0;
  CHECK(throws_naming(bad, "K"));

  bad = good;
  bad.epsilon = -1.0;
  CHECK(throws_naming(bad, "epsilon"));

  bad = good;
  bad.format = "xml";
  CHECK(throws_naming(bad, "format"));

  bad = good;
  bad.method = "magic";
  CHECK(throws_naming(bad, "method"));

  bad = good;
  bad.method = "reflectionless";
  bad.epsilon = 1.0;
  CHECK(throws_naming(bad, "method"));

  bad = good;
  bad.n_max = -1;
  CHECK(throws_naming(bad, "n_max"));

  bad = good;
  bad.tol.root_tol = 0.0;
  CHECK(throws_naming(bad, "root_tol"));

  report::RunConfig scan;
  scan.subcommand = "reflection-scan";
  scan.e_min = 1.0;
  scan.e_max = 0.5;
  scan.e_steps = 5;
  CHECK(throws_naming(scan, "e_max"));
  scan.e_max = 2.0;
  scan.e_steps = 1;
  CHECK(throws_naming(scan, "e_steps"));

  bad = good;
  bad.subcommand = "bogus";
  CHECK(throws_naming(bad, "subcommand"));
}

TEST_CASE("error entries survive JSON escaping") {
  report::Report rep;
  rep.config.subcommand = "spectrum";
  rep.config.method = "wkb";
  std::string msg = "quote \" backslash \\ and\nnewline";
  rep.errors.push_back({3, "shooting", msg});
  json j = json::parse(report::to_json(rep));
  REQUIRE(j["errors"].size() == 1);
  CHECK(j["errors"][0]["n"] == 3);
  CHECK(j["errors"][0]["message"].get<std::string>() == msg);

  std::string csv = report::to_csv(rep);
  CHECK(csv.find("# error: n=3 method=shooting quote") != std::string::npos);
}
