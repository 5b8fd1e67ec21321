#include "catch_amalgamated.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(CONSERVA_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  std::array<char, 512> buf{};
  while (fgets(buf.data(), buf.size(), p)) out += buf.data();
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string spec(const std::string& name) { return std::string(CONSERVA_SPECS) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("conserva_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("run writes tables and a manifest") {
  const fs::path out = scratch("table2");
  const Run r = cli("run " + spec("table2.json") + " --out " + out.string());
  INFO(r.out);
  REQUIRE(r.code == 0);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("experiment") == "table2");
  CHECK(manifest.at("spec").at("experiment") == "table2");
  for (const auto& p : manifest.at("outputs")) CHECK(fs::exists(p.get<std::string>()));
  const std::string csv = slurp(out / "table2.csv");
  CHECK(csv.rfind("tableau,schedule,c\n", 0) == 0);
  CHECK(csv.find("euler,0.05 0.05 0.05 0.05,0.18549375") != std::string::npos);
}

TEST_CASE("coarse-grid comparison from the bundled spec") {
  const fs::path out = scratch("table1");
  REQUIRE(cli("run " + spec("table1_advection.json") + " --out " + out.string()).code == 0);
  const std::string csv = slurp(out / "table1_advection.csv");
  CHECK(csv.find("GS,-0.09375") != std::string::npos);
}

TEST_CASE("malformed spec exits 2 without outputs") {
  const fs::path dir = scratch("bad");
  fs::create_directories(dir);
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"experiment": "table1", "problem": )";
  const fs::path out = dir / "out";
  CHECK(cli("run " + bad.string() + " --out " + out.string()).code == 2);
  CHECK_FALSE(fs::exists(out));

  std::ofstream(bad) << R"({"experiment": "strategy_residuals", "strategies": [
    {"name": "a", "schedule": [1.0]}, {"name": "b", "schedule": [0.5]}]})";
  const Run r = cli("run " + bad.string() + " --out " + out.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("same pseudo-time") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  CHECK(cli("run " + (dir / "missing.json").string()).code == 2);
  CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("identical specs give bit-identical CSV") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(cli("run " + spec("shock_step.json") + " --out " + a.string()).code == 0);
  REQUIRE(cli("run " + spec("shock_step.json") + " --jobs 3 --out " + b.string()).code == 0);
  for (const auto& f : {"shock.csv", "solution_N1.csv", "solution_N3.csv", "solution_N12.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("CONSERVA_OUT selects the output directory") {
  const fs::path out = scratch("env");
  const Run r = cli("run " + spec("table1_burgers.json") + " CONSERVA_OUT_IGNORED");
  CHECK(r.code == 2);  // stray positional argument
  const std::string cmd = "CONSERVA_OUT=" + out.string() + " " + std::string(CONSERVA_CLI) +
                          " run " + spec("table1_burgers.json") + " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(out / "table1_burgers.csv"));
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("constant subcommand") {
  CHECK(cli("constant euler 0.05x4").out == "0.18549375\n");
  CHECK(cli("constant euler 0.05 0.05 0.05 0.05").out == "0.18549375\n");
  CHECK(cli("constant euler 1 0.25x8").out == "1\n");
  CHECK(cli("constant heun 0.25x12").out == "0.948301211715\n");
  const Run bad = cli("constant rk4 0.1");
  CHECK(bad.code == 2);
  CHECK(bad.out.find("unknown tableau") != std::string::npos);
}

TEST_CASE("schedule subcommand") {
  const Run r = cli("schedule euler 0.25 8");
  CHECK(r.code == 0);
  CHECK(r.out == "[1, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25]\nc = 1\n");
  const Run h = cli("schedule heun 0.25 8");
  CHECK(h.code == 1);
  CHECK(h.out.find("no real root") != std::string::npos);
}

TEST_CASE("list subcommand") {
  const Run r = cli("list");
  CHECK(r.code == 0);
  CHECK(r.out.find("ssprk3") != std::string::npos);
  CHECK(r.out.find("euler_vortex") != std::string::npos);
}
