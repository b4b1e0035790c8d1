#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

// Exercises the installed binary end to end. The binary path arrives as the
// first program argument (see tests/CMakeLists.txt).

namespace {

std::string g_binary;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string errfile = "/tmp/ptspec_cli_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++) + ".err";
  std::string cmd = g_binary + " " + args + " 2>" + errfile;
  RunResult res;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return res;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
    res.out.append(buf, got);
  int status = ::pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream ef(errfile);
  std::ostringstream es;
  es << ef.rdbuf();
  res.err = es.str();
  std::remove(errfile.c_str());
  return res;
}

}  // namespace

using nlohmann::json;

TEST_CASE("wedges subcommand emits parseable JSON") {
  auto res = run_cli("wedges --K 1 --epsilon 2");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(j["version"] == "1");
  CHECK(j["config"]["subcommand"] == "wedges");
  CHECK(j["geometry"]["upper_edge_right"]["radians"].get<double>() == 0.0);
  CHECK(j["geometry"]["upper_edge_left"]["as_pi"] == "-pi");
  CHECK(j["roles"].size() == 4);
}

TEST_CASE("wedges subcommand emits CSV on request") {
  auto res = run_cli("wedges --K 2 --epsilon 2 --format csv");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.rfind("quantity,value,as_pi\n", 0) == 0);
  CHECK(res.out.find("upper_edge_right,0,0\n") != std::string::npos);
  CHECK(res.out.find("role_minus_right,decays,") != std::string::npos);
}

TEST_CASE("wkb spectrum is instant and exact") {
  auto res = run_cli("spectrum --K 2 --epsilon 2 --method wkb --n-max 4");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  REQUIRE(j["rows"].size() == 5);
  CHECK(j["rows"][0]["e_wkb"].get<double>() ==
        doctest::Approx(0.9936750866778457241).epsilon(1e-14));
  CHECK(j["errors"].empty());
}

TEST_CASE("shooting spectrum solves the oscillator ground state") {
  auto res =
      run_cli("spectrum --K 1 --epsilon 0 --method shooting --n-max 0");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(std::abs(j["rows"][0]["e_shooting"].get<double>() - 1.0) < 1e-6);
}

TEST_CASE("compare mode fills every method column") {
  auto res = run_cli("compare --K 1 --epsilon 2 --n-max 0");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  CHECK(j["config"]["method"] == "all");
  auto& row = j["rows"][0];
  REQUIRE(row["e_shooting"].is_number());
  REQUIRE(row["e_reflectionless"].is_number());
  REQUIRE(row["e_wkb"].is_number());
  CHECK(row["dev_shoot_refl"].get<double>() < 1e-5);
  CHECK(row["dev_shoot_wkb"].get<double>() < 0.1);
}

TEST_CASE("reflection scan produces one row per grid point") {
  auto res = run_cli(
      "reflection-scan --K 1 --epsilon 2 --e-min 1 --e-max 2 --e-steps 3");
  REQUIRE(res.exit_code == 0);
  json j = json::parse(res.out);
  REQUIRE(j["rows"].size() == 3);
  CHECK(j["rows"][0]["energy"].get<double>() == 1.0);
  CHECK(j["rows"][2]["energy"].get<double>() == 2.0);
  for (auto& row : j["rows"]) CHECK(row["flux_error"].get<double>() < 1e-4);
}

TEST_CASE("--out writes the report to a file") {
  std::string path = "/tmp/ptspec_cli_" + std::to_string(::getpid()) + ".json";
  auto res = run_cli("wedges --K 1 --epsilon 2 --out " + path);
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.empty());
  std::ifstream in(path);
  REQUIRE(in.good());
  json j = json::parse(in);
  CHECK(j["version"] == "1");
  std::remove(path.c_str());
}

TEST_CASE("configuration errors exit with code 1 and name the field") {
  auto res = run_cli("spectrum --K 0 --epsilon 2");
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("K") != std::string::npos);

  res = run_cli("spectrum --K 1 --epsilon 1 --method reflectionless");
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("method") != std::string::npos);

  res = run_cli("reflection-scan --K 1 --epsilon 2 --e-min 1 --e-max 2");
  CHECK(res.exit_code == 1);

  res = run_cli("");
  CHECK(res.exit_code == 1);
}

TEST_CASE("per-point scan failures exit with code 2 but keep the report") {
  auto res = run_cli(
      "reflection-scan --K 1 --epsilon 2 --e-min 1 --e-max 1000000 "
      "--e-steps 2 --L 8");
  REQUIRE(res.exit_code == 2);
  json j = json::parse(res.out);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][1]["r_abs"].is_null());
  CHECK(!j["errors"].empty());
  CHECK(res.err.find("error:") != std::string::npos);
}

TEST_CASE("unresolvable deep reflection levels exit with code 2") {
  auto res = run_cli(
      "spectrum --K 1 --epsilon 2 --method reflectionless --n-max 7");
  REQUIRE(res.exit_code == 2);
  json j = json::parse(res.out);
  REQUIRE(j["rows"].size() == 8);
  // shallow levels resolve, the deepest cannot rise above transport noise
  CHECK(j["rows"][0]["e_reflectionless"].is_number());
  CHECK(j["rows"][7]["e_reflectionless"].is_null());
  bool deep_failure = false;
  for (auto& e : j["errors"])
    if (e["n"].get<int>() == 7) deep_failure = true;
  CHECK(deep_failure);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli-binary> [doctest args]\n",
                 argv[0]);
    return 1;
  }
  g_binary = argv[1];
  std::vector<char*> args;
  args.push_back(argv[0]);
  for (int i = 2; i < argc; ++i) args.push_back(argv[i]);
  doctest::Context ctx(int(args.size()), args.data());
  return ctx.run();
}
