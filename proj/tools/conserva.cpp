#include "conserva/conserva.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace conserva;

namespace {

constexpr int exit_spec_error = 2;
constexpr int exit_solver_error = 3;

ButcherTableau load_tableau(const std::string& arg) {
  if (fs::exists(arg)) {
    std::ifstream in(arg);
    return ButcherTableau::from_json(json::parse(in));
  }
  return ButcherTableau::by_name(arg);
}

/// "0.25" or "0.25x8" (eight copies).
std::vector<double> expand_mu(const std::vector<std::string>& tokens) {
  std::vector<double> mu;
  for (const auto& tok : tokens) {
    std::string t = tok;
    for (const std::string times : {"\xC3\x97", "*"}) {
      for (auto p = t.find(times); p != std::string::npos; p = t.find(times)) t.replace(p, times.size(), "x");
    }
    const auto x = t.find('x');
    std::size_t used = 0;
    const double v = std::stod(t.substr(0, x), &used);
    if (used != (x == std::string::npos ? t.size() : x)) throw std::invalid_argument("bad step ratio '" + tok + "'");
    int count = 1;
    if (x != std::string::npos) count = std::stoi(t.substr(x + 1));
    if (count < 1) throw std::invalid_argument("bad repeat count in '" + tok + "'");
    mu.insert(mu.end(), static_cast<std::size_t>(count), v);
  }
  return mu;
}

std::string print_schedule(const PseudoSchedule& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < s.size(); ++k) os << (k ? ", " : "") << format_double(s[k]);
  os << ']';
  return os.str();
}

fs::path output_dir(const std::string& flag, const fs::path& spec) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CONSERVA_OUT"); env && *env) return env;
  return fs::path("conserva_out") / spec.stem();
}

int cmd_run(const std::string& spec_path, const std::string& out_flag, int jobs) {
  json spec;
  {
    std::ifstream in(spec_path);
    if (!in) {
      std::cerr << "error: cannot read " << spec_path << '\n';
      return exit_spec_error;
    }
    try {
      spec = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "error: " << spec_path << ": " << e.what() << '\n';
      return exit_spec_error;
    }
  }
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  try {
    result = run_experiment(spec, jobs);
  } catch (const SpecError& e) {
    std::cerr << "error: invalid experiment spec: " << e.what() << '\n';
    return exit_spec_error;
  } catch (const std::exception& e) {
    std::cerr << "error: solver failure: " << e.what() << '\n';
    return exit_solver_error;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir = output_dir(out_flag, spec_path);
  fs::create_directories(dir);
  json manifest;
  manifest["spec"] = spec;
  manifest["experiment"] = result.experiment;
  manifest["wall_time_seconds"] = wall;
  manifest["summary"] = result.summary;
  manifest["outputs"] = json::array();
  for (const auto& [name, table] : result.tables) {
    table.write(dir / name);
    manifest["outputs"].push_back((dir / name).string());
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  std::cout << "wrote " << result.tables.size() << " tables and manifest.json to " << dir.string() << '\n';
  return 0;
}

int cmd_constant(const std::string& tableau, const std::vector<std::string>& mu) {
  const ButcherTableau tab = load_tableau(tableau);
  const PseudoSchedule s(expand_mu(mu));
  std::cout << std::setprecision(12) << modification_constant(tab, s) << '\n';
  return 0;
}

int cmd_schedule(const std::string& tableau, double mu, int n) {
  const ButcherTableau tab = load_tableau(tableau);
  try {
    const PseudoSchedule s = root_first_schedule(tab, mu, n);
    std::cout << print_schedule(s) << "\nc = " << std::setprecision(12)
              << modification_constant(tab, s) << '\n';
    return 0;
  } catch (const NoRealRootError& e) {
    std::cerr << "no real root: " << e.what() << '\n';
    return 1;
  }
}

void cmd_list() {
  std::cout << "tableaus:";
  for (const auto& n : ButcherTableau::builtin_names()) std::cout << ' ' << n;
  std::cout << "\nfluxes: " << CentralAdvection::name << ' ' << UpwindAdvection::name << ' '
            << UpwindBurgers::name << " centered4_euler\nsolvers:";
  for (auto s : {InnerSolver::exact, InnerSolver::richardson, InnerSolver::jacobi,
                 InnerSolver::gauss_seidel, InnerSolver::gmres, InnerSolver::cgc, InnerSolver::heun})
    std::cout << ' ' << to_string(s);
  std::cout << " pseudo_time\nexperiments:";
  for (const auto& k : experiment_kinds()) std::cout << ' ' << k;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-volume conservation workbench"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run an experiment described by a JSON file");
  run->add_option("spec", spec_path, "experiment JSON")->required();
  run->add_option("--out", out_dir, "output directory (default: $CONSERVA_OUT or conserva_out/<spec>)");
  run->add_option("--jobs,-j", jobs, "parallel sweep members")->check(CLI::PositiveNumber);

  std::string tableau;
  std::vector<std::string> mu_tokens;
  auto* constant = app.add_subcommand("constant", "print the modification constant c");
  constant->add_option("tableau", tableau, "tableau name or JSON file")->required();
  constant->add_option("mu", mu_tokens, "step ratios, MU or MUxCOUNT")->required();

  double base_mu = 0.0;
  int tail = 0;
  auto* schedule = app.add_subcommand("schedule", "print a root-first schedule");
  schedule->add_option("tableau", tableau, "tableau name or JSON file")->required();
  schedule->add_option("mu", base_mu, "tail step ratio")->required();
  schedule->add_option("n", tail, "tail length")->required()->check(CLI::NonNegativeNumber);

  auto* list = app.add_subcommand("list", "list tableaus, fluxes, solvers and experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_spec_error;
  }

  try {
    if (*run) return cmd_run(spec_path, out_dir, jobs);
    if (*constant) return cmd_constant(tableau, mu_tokens);
    if (*schedule) return cmd_schedule(tableau, base_mu, tail);
    if (*list) cmd_list();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_spec_error;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_spec_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_solver_error;
  }
  return 0;
}
