#pragma once

// Canonical problems and experiment drivers. Each driver has a typed config,
// a parser from the JSON experiment document, and a run function returning
// plain result structs; `run_experiment` ties them to CSV tables and a JSON
// summary for the command-line front end.

#include "conserva/csv.hpp"
#include "conserva/diagnostics.hpp"
#include "conserva/linear_solvers.hpp"
#include "conserva/newton.hpp"
#include "conserva/pseudo_time.hpp"
#include "conserva/semidisc.hpp"
#include "conserva/tableau.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace conserva {

using json = nlohmann::json;

/// Malformed or inconsistent experiment document.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mtx;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mtx);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Problems

struct Problem1D {
  std::string name;
  Grid1D grid;
  ScalarFlux flux;
  FluxScaling scaling = FluxScaling::divided_by_dx;
  Vector u0;
  std::optional<double> inflow;

  Semidisc1D<> semidisc() const { return {grid, flux}; }
  ImplicitEulerSystem<> system(double dt, Vector previous) const {
    ImplicitEulerSystem<> sys(semidisc(), dt, std::move(previous), scaling);
    sys.set_inflow(inflow);
    return sys;
  }
};

namespace problems {

/// u_t + u_x = 0 on (a, b] from exp(-k x^2), flux-difference scaling.
inline Problem1D advection(Index cells, double a = -1.5, double b = 1.5,
                           ScalarFlux flux = CentralAdvection{}, double k = 50.0) {
  Grid1D g(a, b, cells);
  return {"advection", g, flux, FluxScaling::flux_difference,
          sample(g, [k](double x) { return std::exp(-k * x * x); }).values(), std::nullopt};
}

/// Burgers on (-1.5, 1.5] from exp(-x^2).
inline Problem1D burgers_gaussian(Index cells) {
  Grid1D g(-1.5, 1.5, cells);
  return {"burgers", g, UpwindBurgers{}, FluxScaling::divided_by_dx,
          sample(g, [](double x) { return std::exp(-x * x); }).values(), std::nullopt};
}

inline Problem1D burgers_triangle(Index cells) {
  Grid1D g(0.0, 1.0, cells);
  return {"burgers_triangle", g, UpwindBurgers{}, FluxScaling::divided_by_dx,
          sample(g, [](double x) { return x <= 0.5 ? x : 0.0; }).values(), std::nullopt};
}

/// Step at 0.24 with the leftmost cell pinned to the inflow value 1.
inline Problem1D burgers_step(Index cells) {
  Grid1D g(0.0, 1.0, cells);
  return {"burgers_step", g, UpwindBurgers{}, FluxScaling::divided_by_dx,
          sample(g, [](double x) { return x <= 0.24 ? 1.0 : 0.0; }).values(), 1.0};
}

}  // namespace problems

struct PseudoConfig {
  ButcherTableau tableau = ButcherTableau::euler();
  PseudoSchedule schedule;
};

using StepMethod = std::variant<NewtonConfig, PseudoConfig>;

/// One implicit Euler step from un.
inline Vector implicit_step(const Problem1D& p, double dt, const Vector& un,
                            const StepMethod& method) {
  const auto sys = p.system(dt, un);
  if (const auto* n = std::get_if<NewtonConfig>(&method)) return newton_solve(sys, un, *n).u;
  const auto& ps = std::get<PseudoConfig>(method);
  return pseudo_solve(sys, ps.tableau, ps.schedule, un).u;
}

/// Marches `steps` implicit Euler steps; observer(n, t, u) sees every new state.
template <class Observer>
Vector march(const Problem1D& p, double dt, int steps, const StepMethod& method, Observer&& obs) {
  Vector u = p.u0;
  if (p.inflow) u[0] = *p.inflow;
  for (int n = 1; n <= steps; ++n) {
    u = implicit_step(p, dt, u, method);
    if (!u.allFinite()) throw std::runtime_error(p.name + ": solution became non-finite at step " + std::to_string(n));
    obs(n, n * dt, u);
  }
  return u;
}

inline Vector march(const Problem1D& p, double dt, int steps, const StepMethod& method) {
  return march(p, dt, steps, method, [](int, double, const Vector&) {});
}

inline int step_count(double T, double dt) {
  const double n = T / dt;
  const long r = std::lround(n);
  if (std::abs(n - static_cast<double>(r)) > 1e-9 * std::max(1.0, n))
    throw SpecError("end time is not a whole number of time steps");
  return static_cast<int>(r);
}

// ---------------------------------------------------------------------------
// Schedules and tableaus from JSON

inline ButcherTableau parse_tableau(const json& j) {
  if (j.is_string()) return ButcherTableau::by_name(j.get<std::string>());
  if (j.is_object()) return ButcherTableau::from_json(j);
  throw SpecError("tableau must be a name or a {name, s, A, b, c} object");
}

/// [mu...] | {"constant": mu, "count": n} | {"halving": n} | {"root_first": {"mu": m, "tail": n}}
inline PseudoSchedule parse_schedule(const json& j, const ButcherTableau& tab) {
  if (j.is_array()) return PseudoSchedule(j.get<std::vector<double>>());
  if (!j.is_object()) throw SpecError("schedule must be an array or an object");
  if (j.contains("constant")) return PseudoSchedule::constant(j.at("constant").get<double>(), j.at("count").get<int>());
  if (j.contains("halving")) return PseudoSchedule::halving(j.at("halving").get<int>());
  if (j.contains("root_first")) {
    const json& r = j.at("root_first");
    return root_first_schedule(tab, r.at("mu").get<double>(), r.at("tail").get<int>());
  }
  throw SpecError("unrecognised schedule form");
}

inline json schedule_json(const PseudoSchedule& s) { return s.values(); }

struct NamedSchedule {
  std::string name;
  PseudoSchedule schedule;
};

/// Strategies compared against each other must march to the same pseudo-time.
inline void require_equal_pseudo_time(const std::vector<NamedSchedule>& strategies) {
  for (const auto& s : strategies)
    if (std::abs(s.schedule.sum() - strategies.front().schedule.sum()) > 1e-12)
      throw SpecError("strategies '" + strategies.front().name + "' and '" + s.name +
                      "' do not integrate to the same pseudo-time");
}

inline std::vector<NamedSchedule> parse_strategies(const json& j, const ButcherTableau& tab) {
  std::vector<NamedSchedule> out;
  for (const auto& s : j) out.push_back({s.at("name").get<std::string>(), parse_schedule(s.at("schedule"), tab)});
  if (out.empty()) throw SpecError("at least one strategy required");
  require_equal_pseudo_time(out);
  return out;
}

// ---------------------------------------------------------------------------
// Single-step solver comparison on a coarse grid

struct Table1Config {
  std::string problem = "advection";  // or "burgers"
  Index cells = 6;
  double dt = 0.5;
  double theta = 0.5;
  double heun_mu = 0.5;
};

struct Table1Row {
  std::string method;
  double mass_error = 0.0;
  double residual = 0.0;
  double predicted_error = std::numeric_limits<double>::quiet_NaN();
};

inline Problem1D table1_problem(const Table1Config& cfg) {
  if (cfg.problem == "advection") return problems::advection(cfg.cells);
  if (cfg.problem == "burgers") return problems::burgers_gaussian(cfg.cells);
  throw SpecError("table1: unknown problem '" + cfg.problem + "'");
}

inline const std::vector<std::pair<std::string, InnerSolver>>& table1_methods() {
  static const std::vector<std::pair<std::string, InnerSolver>> m{
      {"Exact", InnerSolver::exact},  {"R", InnerSolver::richardson},
      {"J", InnerSolver::jacobi},     {"GS", InnerSolver::gauss_seidel},
      {"GM", InnerSolver::gmres},     {"CGC", InnerSolver::cgc},
      {"H", InnerSolver::heun}};
  return m;
}

/// One Newton step from u^n per inner solver, each given a single inner iteration from 0.
inline std::vector<Table1Row> run_table1(const Table1Config& cfg) {
  const Problem1D p = table1_problem(cfg);
  const auto sys = p.system(cfg.dt, p.u0);
  std::vector<Table1Row> rows;
  for (const auto& [label, solver] : table1_methods()) {
    NewtonConfig nc;
    nc.inner = solver;
    nc.theta = cfg.theta;
    nc.heun_mu = cfg.heun_mu;
    const auto r = newton_solve(sys, p.u0, nc);
    rows.push_back({label, r.trace.back().mass_error, r.trace.back().residual,
                    r.inner.front().back().predicted_error});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Modification constants

struct ConstantEntry {
  ButcherTableau tableau;
  PseudoSchedule schedule;
};

inline std::vector<ConstantEntry> table2_default_entries() {
  std::vector<ConstantEntry> e;
  for (const auto& name : ButcherTableau::builtin_names())
    e.push_back({ButcherTableau::by_name(name), PseudoSchedule::constant(0.05, 4)});
  for (const auto& name : ButcherTableau::builtin_names())
    e.push_back({ButcherTableau::by_name(name), PseudoSchedule::halving(4)});
  return e;
}

// ---------------------------------------------------------------------------
// Mass history of full runs

struct MassHistoryConfig {
  std::string problem = "advection";
  Index cells = 250;
  double T = 6.0;
  int newton_iterations = 1;
  int inner_iterations = 5;
  int cgc_iterations = 1;
  double theta = 0.5;
  double heun_mu = 0.5;
  std::vector<InnerSolver> methods{InnerSolver::exact,        InnerSolver::richardson,
                                   InnerSolver::jacobi,       InnerSolver::gauss_seidel,
                                   InnerSolver::gmres,        InnerSolver::cgc,
                                   InnerSolver::heun};
};

struct MassHistory {
  InnerSolver method;
  MassAudit audit;
};

inline Problem1D mass_history_problem(const MassHistoryConfig& cfg) {
  if (cfg.problem == "advection") return problems::advection(cfg.cells);
  if (cfg.problem == "burgers") return problems::burgers_gaussian(cfg.cells);
  throw SpecError("mass_history: unknown problem '" + cfg.problem + "'");
}

inline std::vector<MassHistory> run_mass_history(const MassHistoryConfig& cfg, int jobs = 1) {
  const Problem1D p = mass_history_problem(cfg);
  const double dt = p.grid.dx();
  const int steps = step_count(cfg.T, dt);
  const double m0 = weighted_sum(p.grid.volumes(), p.u0);
  std::vector<MassHistory> out;
  for (auto s : cfg.methods) out.push_back({s, MassAudit(m0)});
  parallel_for(out.size(), jobs, [&](std::size_t k) {
    NewtonConfig nc;
    nc.outer = cfg.newton_iterations;
    nc.inner = out[k].method;
    nc.inner_iterations = out[k].method == InnerSolver::cgc ? cfg.cgc_iterations : cfg.inner_iterations;
    nc.theta = cfg.theta;
    nc.heun_mu = cfg.heun_mu;
    MassAudit& audit = out[k].audit;
    march(p, dt, steps, nc, [&](int, double t, const Vector& u) {
      audit.observe(t, weighted_sum(p.grid.volumes(), u), weighted_sum(p.grid.volumes(), u.cwiseAbs()));
    });
  });
  return out;
}

// ---------------------------------------------------------------------------
// Grid convergence towards the original and the modified law

struct ConvergenceConfig {
  std::string problem = "advection";  // advection | burgers_triangle | burgers_step
  PseudoConfig pseudo{ButcherTableau::euler(), PseudoSchedule::constant(0.05, 4)};
  std::vector<int> levels{1, 2, 3, 4, 5, 6, 7, 8};
  double T = 0.25;
};

struct ConvergenceRow {
  int level = 0;
  Index cells = 0;
  double dx = 0.0;
  double error_original = 0.0;
  double error_modified = 0.0;
};

struct ConvergenceResult {
  double c = 0.0;
  std::vector<ConvergenceRow> rows;

  /// log2 ratios of successive modified-law errors.
  std::vector<double> orders_modified() const {
    std::vector<double> o;
    for (std::size_t k = 1; k < rows.size(); ++k)
      o.push_back(std::log(rows[k - 1].error_modified / rows[k].error_modified) /
                  std::log(rows[k - 1].dx / rows[k].dx));
    return o;
  }
};

/// Problem on level j: advection dx = 2/(40 2^j) on (-1, 1]; Burgers dx = 1/(25 2^j) on (0, 1].
inline Problem1D convergence_problem(const std::string& problem, int level) {
  if (level < 0 || level > 24) throw SpecError("convergence: level out of range");
  const Index scale = Index{1} << level;
  if (problem == "advection") return problems::advection(40 * scale, -1.0, 1.0, UpwindAdvection{});
  if (problem == "burgers_triangle") return problems::burgers_triangle(25 * scale);
  if (problem == "burgers_step") return problems::burgers_step(25 * scale);
  throw SpecError("convergence: unknown problem '" + problem + "'");
}

inline ExactSolution convergence_exact(const std::string& problem, double c) {
  if (problem == "advection") return ExactSolution::advection_pulse(-1.0, 1.0, c);
  if (problem == "burgers_triangle") return ExactSolution::burgers_triangle(c);
  return ExactSolution::burgers_step(c);
}

inline ConvergenceResult run_convergence(const ConvergenceConfig& cfg, int jobs = 1) {
  ConvergenceResult res;
  res.c = modification_constant(cfg.pseudo.tableau, cfg.pseudo.schedule);
  res.rows.resize(cfg.levels.size());
  const ExactSolution original = convergence_exact(cfg.problem, 1.0);
  const ExactSolution modified = convergence_exact(cfg.problem, res.c);
  parallel_for(cfg.levels.size(), jobs, [&](std::size_t k) {
    const Problem1D p = convergence_problem(cfg.problem, cfg.levels[k]);
    const double dt = p.grid.dx();
    const int steps = step_count(cfg.T, dt);
    const Vector u = march(p, dt, steps, cfg.pseudo);
    const double t = steps * dt;
    res.rows[k] = {cfg.levels[k], p.grid.cells(), p.grid.dx(), l2_error(p.grid, u, original, t),
                   l2_error(p.grid, u, modified, t)};
  });
  return res;
}

// ---------------------------------------------------------------------------
// Propagation speed of a pulse

struct SpeedConfig {
  ButcherTableau tableau = ButcherTableau::heun();
  double mu = 0.2;
  /// Pseudo-time iterations per step; 0 picks the smallest N with phi(-mu)^N <= phi_target.
  int iterations = 0;
  double phi_target = 0.1;
  Index cells = 133;
  double a = -0.2;
  double b = 0.2;
  double T = 6.0;
};

struct SpeedResult {
  int iterations = 0;
  double predicted = 0.0;  // phi(-mu)^N = 1 - c
  double measured = 0.0;   // 1 - measured speed
  bool unimodal = true;
  CsvTable track;
};

inline int iterations_for_target(const ButcherTableau& tab, double mu, double target) {
  const double phi = tab.stability(-mu);
  if (!(std::abs(phi) < 1.0)) throw SpecError("pseudo-time step outside the stability interval");
  double v = 1.0;
  for (int N = 1; N < 100000; ++N) {
    v *= phi;
    if (std::abs(v) <= target) return N;
  }
  throw SpecError("phi target not reachable");
}

inline SpeedResult run_speed(const SpeedConfig& cfg) {
  SpeedResult r;
  r.iterations = cfg.iterations > 0 ? cfg.iterations : iterations_for_target(cfg.tableau, cfg.mu, cfg.phi_target);
  const PseudoConfig pc{cfg.tableau, PseudoSchedule::constant(cfg.mu, r.iterations)};
  r.predicted = 1.0 - modification_constant(pc.tableau, pc.schedule);
  const Problem1D p = problems::advection(cfg.cells, cfg.a, cfg.b, UpwindAdvection{});
  const double dt = p.grid.dx();
  PeakTracker tracker(p.grid);
  march(p, dt, step_count(cfg.T, dt) , pc, [&](int, double t, const Vector& u) { tracker.observe(t, u); });
  const auto m = tracker.measure();
  r.measured = 1.0 - m.speed;
  r.unimodal = m.unimodal;
  r.track = tracker.to_csv();
  return r;
}

// ---------------------------------------------------------------------------
// Shock location

struct ShockConfig {
  ShockProblem problem = ShockProblem::triangle;
  Index cells = 400;
  double T = 0.1;
  PseudoConfig pseudo{ButcherTableau::euler(), PseudoSchedule::constant(0.25, 12)};
};

struct ShockResult {
  double c = 0.0;
  Grid1D grid;
  Vector u;
  double T = 0.0;
  ShockPrediction predicted;
  double front = 0.0;
  double error_original = 0.0;
  double error_modified = 0.0;

  CsvTable solution_csv() const {
    CsvTable t({"x", "u"});
    for (Index i = 0; i < grid.cells(); ++i) t.add_row({grid.node(i), u[i]});
    return t;
  }
};

inline ShockResult run_shock(const ShockConfig& cfg) {
  const Problem1D p = cfg.problem == ShockProblem::triangle ? problems::burgers_triangle(cfg.cells)
                                                            : problems::burgers_step(cfg.cells);
  ShockResult r;
  r.c = modification_constant(cfg.pseudo.tableau, cfg.pseudo.schedule);
  r.grid = p.grid;
  const double dt = p.grid.dx();
  const int steps = step_count(cfg.T, dt);
  r.T = steps * dt;
  r.u = march(p, dt, steps, cfg.pseudo);
  r.predicted = shock_predictions(cfg.problem, r.c, r.T);
  // fronts are smeared: threshold at half the predicted height
  r.front = shock_front(p.grid, r.u, 0.5 * r.predicted.height);
  const bool tri = cfg.problem == ShockProblem::triangle;
  r.error_original = l2_error(p.grid, r.u, tri ? ExactSolution::burgers_triangle(1.0) : ExactSolution::burgers_step(1.0), r.T);
  r.error_modified = l2_error(p.grid, r.u, tri ? ExactSolution::burgers_triangle(r.c) : ExactSolution::burgers_step(r.c), r.T);
  return r;
}

// ---------------------------------------------------------------------------
// Residual histories of pseudo-time strategies in the first physical step

struct StrategyConfig {
  std::string problem = "burgers_triangle";
  Index cells = 400;
  ButcherTableau tableau = ButcherTableau::euler();
  std::vector<NamedSchedule> strategies{{"strategy1", PseudoSchedule::constant(0.25, 12)},
                                        {"strategy2", root_first_schedule(ButcherTableau::euler(), 0.25, 8)}};
};

struct StrategyHistory {
  std::string name;
  double c = 0.0;
  std::vector<double> relative_residuals;  // entry k after k iterations
};

inline std::vector<StrategyHistory> run_strategies(const StrategyConfig& cfg) {
  require_equal_pseudo_time(cfg.strategies);
  Problem1D p = cfg.problem == "burgers_step" ? problems::burgers_step(cfg.cells)
              : cfg.problem == "burgers_triangle" ? problems::burgers_triangle(cfg.cells)
              : throw SpecError("strategies: unknown problem '" + cfg.problem + "'");
  const auto sys = p.system(p.grid.dx(), p.u0);
  std::vector<StrategyHistory> out;
  for (const auto& s : cfg.strategies) {
    const auto r = pseudo_solve(sys, cfg.tableau, s.schedule, p.u0);
    StrategyHistory h{s.name, modification_constant(cfg.tableau, s.schedule), {}};
    for (const auto& e : r.trace.entries()) h.relative_residuals.push_back(e.residual);
    out.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isentropic vortex

struct VortexConfig {
  double dx = 0.4;
  double dt = 0.1;
  double T = 10.0;
  ButcherTableau tableau = ButcherTableau::euler();
  std::vector<NamedSchedule> strategies{{"strategy1", PseudoSchedule::constant(0.2, 9)},
                                        {"strategy2", root_first_schedule(ButcherTableau::euler(), 0.2, 4)}};
  IsentropicVortex vortex;
};

struct VortexRun {
  std::string name;
  double c = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double mass_drift = 0.0;  // relative, density
  double error_original = 0.0;
  double error_modified = 0.0;
  CsvTable track{{"t", "center_x", "center_y", "mass_error"}};
};

inline Grid2D vortex_grid(double dx) {
  const long mx = std::lround(20.0 / dx);
  const long my = std::lround(10.0 / dx);
  if (std::abs(mx * dx - 20.0) > 1e-9 || std::abs(my * dx - 10.0) > 1e-9)
    throw SpecError("vortex: dx must divide the domain");
  return {-5.0, 15.0, mx, -5.0, 5.0, my};
}

inline VortexRun run_vortex_strategy(const VortexConfig& cfg, const NamedSchedule& strategy) {
  const Grid2D grid = vortex_grid(cfg.dx);
  const EulerSemidisc2D disc(grid, EulerGas{cfg.vortex.gamma});
  VortexRun r;
  r.name = strategy.name;
  r.c = modification_constant(cfg.tableau, strategy.schedule);
  Vector u = cfg.vortex.conserved(grid);
  const auto vol = grid.volumes();
  const double m0 = weighted_sum(vol, u, 4, 0);
  const int steps = step_count(cfg.T, cfg.dt);
  double worst = 0.0;
  for (int n = 1; n <= steps; ++n) {
    const EulerImplicitSystem sys(disc, cfg.dt, u);
    u = pseudo_solve(sys, cfg.tableau, strategy.schedule, u).u;
    if (!u.allFinite()) throw std::runtime_error("vortex: solution became non-finite");
    const double drift = weighted_sum(vol, u, 4, 0) - m0;
    worst = std::max(worst, std::abs(drift));
    const auto ctr = vortex_center(grid, u);
    r.track.add_row({n * cfg.dt, ctr[0], ctr[1], drift});
  }
  const auto ctr = vortex_center(grid, u);
  r.center_x = ctr[0];
  r.center_y = ctr[1];
  r.mass_drift = worst / std::abs(m0);
  const double T = steps * cfg.dt;
  r.error_original = density_l2_error(grid, u, cfg.vortex.conserved(grid, T));
  r.error_modified = density_l2_error(grid, u, cfg.vortex.conserved(grid, r.c * T));
  return r;
}

inline std::vector<VortexRun> run_vortex(const VortexConfig& cfg, int jobs = 1) {
  require_equal_pseudo_time(cfg.strategies);
  std::vector<VortexRun> out(cfg.strategies.size());
  parallel_for(out.size(), jobs, [&](std::size_t k) { out[k] = run_vortex_strategy(cfg, cfg.strategies[k]); });
  return out;
}

// ---------------------------------------------------------------------------
// JSON front end

struct ExperimentResult {
  std::string experiment;
  json summary;
  std::vector<std::pair<std::string, CsvTable>> tables;
};

namespace detail {

template <class F>
auto parse_phase(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SpecError&) {
    throw;
  } catch (const json::exception& e) {
    throw SpecError(e.what());
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  } catch (const std::domain_error& e) {
    throw SpecError(e.what());
  }
}

inline PseudoConfig parse_pseudo(const json& j, const char* default_tableau = "euler") {
  PseudoConfig pc;
  pc.tableau = parse_tableau(j.contains("tableau") ? j.at("tableau") : json(default_tableau));
  pc.schedule = parse_schedule(j.at("schedule"), pc.tableau);
  return pc;
}

inline ShockProblem parse_shock_problem(const std::string& s) {
  if (s == "triangle" || s == "burgers_triangle") return ShockProblem::triangle;
  if (s == "step" || s == "burgers_step") return ShockProblem::step;
  throw SpecError("unknown shock problem '" + s + "'");
}

inline ExperimentResult table1(const json& j) {
  const auto cfg = parse_phase([&] {
    Table1Config c;
    c.problem = j.value("problem", c.problem);
    c.cells = j.value("cells", c.cells);
    c.dt = j.value("dt", c.dt);
    c.theta = j.value("theta", c.theta);
    c.heun_mu = j.value("heun_mu", c.heun_mu);
    table1_problem(c);
    return c;
  });
  ExperimentResult r{"table1", json::object(), {}};
  CsvTable t({"method", "mass_error", "residual", "predicted_error"});
  json rows = json::array();
  for (const auto& row : run_table1(cfg)) {
    t.add_row({row.method, row.mass_error, row.residual, row.predicted_error});
    rows.push_back({{"method", row.method}, {"mass_error", row.mass_error}, {"residual", row.residual}});
  }
  r.summary["problem"] = cfg.problem;
  r.summary["rows"] = rows;
  r.tables.emplace_back("table1_" + cfg.problem + ".csv", std::move(t));
  return r;
}

inline ExperimentResult table2(const json& j) {
  const auto entries = parse_phase([&] {
    if (!j.contains("entries")) return table2_default_entries();
    std::vector<ConstantEntry> e;
    for (const auto& item : j.at("entries")) {
      const PseudoConfig pc = parse_pseudo(item);
      e.push_back({pc.tableau, pc.schedule});
    }
    return e;
  });
  ExperimentResult r{"table2", json::object(), {}};
  CsvTable t({"tableau", "schedule", "c"});
  json rows = json::array();
  for (const auto& e : entries) {
    const double c = modification_constant(e.tableau, e.schedule);
    std::string sched;
    for (double mu : e.schedule) sched += (sched.empty() ? "" : " ") + format_double(mu);
    t.add_row({e.tableau.name(), sched, c});
    rows.push_back({{"tableau", e.tableau.name()}, {"schedule", schedule_json(e.schedule)}, {"c", c}});
  }
  r.summary["constants"] = rows;
  r.tables.emplace_back("table2.csv", std::move(t));
  return r;
}

inline ExperimentResult mass_history(const json& j, int jobs) {
  const auto cfg = parse_phase([&] {
    MassHistoryConfig c;
    c.problem = j.value("problem", c.problem);
    c.cells = j.value("cells", c.cells);
    c.T = j.value("T", c.T);
    c.newton_iterations = j.value("newton_iterations", c.newton_iterations);
    c.inner_iterations = j.value("inner_iterations", c.inner_iterations);
    c.cgc_iterations = j.value("cgc_iterations", c.cgc_iterations);
    c.theta = j.value("theta", c.theta);
    c.heun_mu = j.value("heun_mu", c.heun_mu);
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(inner_solver_from_name(m.get<std::string>()));
    }
    const Problem1D p = mass_history_problem(c);
    step_count(c.T, p.grid.dx());
    return c;
  });
  const auto runs = run_mass_history(cfg, jobs);
  std::vector<std::string> header{"step"};
  for (const auto& h : runs) header.emplace_back(to_string(h.method));
  CsvTable t(header);
  const std::size_t steps = runs.empty() ? 0 : runs.front().audit.drift().size();
  for (std::size_t n = 0; n < steps; ++n) {
    std::vector<CsvTable::Cell> row{static_cast<long long>(n + 1)};
    for (const auto& h : runs) row.emplace_back(h.audit.drift()[n]);
    t.add_row(std::move(row));
  }
  ExperimentResult r{"mass_history", json::object(), {}};
  r.summary["problem"] = cfg.problem;
  r.summary["initial_mass"] = runs.empty() ? 0.0 : runs.front().audit.initial();
  for (const auto& h : runs) {
    const std::string name(to_string(h.method));
    r.summary["max_mass_drift"][name] = h.audit.max_drift();
    r.summary["max_scaled_mass_drift"][name] = h.audit.max_scaled_drift();
    r.summary["largest_absolute_mass"][name] = h.audit.largest_absolute_mass();
  }
  r.tables.emplace_back("mass_history_" + cfg.problem + ".csv", std::move(t));
  return r;
}

inline ExperimentResult convergence(const json& j, int jobs) {
  const auto cfg = parse_phase([&] {
    ConvergenceConfig c;
    c.problem = j.value("problem", c.problem);
    c.pseudo = parse_pseudo(j);
    c.levels = j.value("levels", c.levels);
    c.T = j.value("T", c.problem == "advection" ? 0.25 : 0.1);
    for (int l : c.levels) step_count(c.T, convergence_problem(c.problem, l).grid.dx());
    return c;
  });
  const auto res = run_convergence(cfg, jobs);
  CsvTable t({"level", "cells", "dx", "error_original", "error_modified"});
  for (const auto& row : res.rows)
    t.add_row({static_cast<long long>(row.level), static_cast<long long>(row.cells), row.dx,
               row.error_original, row.error_modified});
  ExperimentResult r{"convergence", json::object(), {}};
  r.summary["problem"] = cfg.problem;
  r.summary["tableau"] = cfg.pseudo.tableau.name();
  r.summary["schedule"] = schedule_json(cfg.pseudo.schedule);
  r.summary["c"] = res.c;
  r.summary["orders_modified"] = res.orders_modified();
  r.tables.emplace_back("convergence_" + cfg.problem + ".csv", std::move(t));
  return r;
}

inline ExperimentResult speed(const json& j, int jobs) {
  const auto cases = parse_phase([&] {
    std::vector<SpeedConfig> out;
    const json items = j.contains("cases") ? j.at("cases") : json::array({j});
    for (const auto& item : items) {
      SpeedConfig c;
      c.tableau = parse_tableau(item.value("tableau", json("heun")));
      c.mu = item.value("mu", c.mu);
      c.iterations = item.value("iterations", c.iterations);
      c.phi_target = item.value("phi_target", c.phi_target);
      c.cells = j.value("cells", c.cells);
      c.T = j.value("T", c.T);
      if (c.iterations <= 0) iterations_for_target(c.tableau, c.mu, c.phi_target);
      out.push_back(c);
    }
    return out;
  });
  std::vector<SpeedResult> results(cases.size());
  parallel_for(cases.size(), jobs, [&](std::size_t k) { results[k] = run_speed(cases[k]); });
  ExperimentResult r{"propagation_speed", json::object(), {}};
  CsvTable t({"tableau", "mu", "N", "predicted_speed_error", "measured_speed_error"});
  for (std::size_t k = 0; k < cases.size(); ++k) {
    t.add_row({cases[k].tableau.name(), cases[k].mu, static_cast<long long>(results[k].iterations),
               results[k].predicted, results[k].measured});
    r.summary["cases"].push_back({{"tableau", cases[k].tableau.name()},
                                  {"mu", cases[k].mu},
                                  {"N", results[k].iterations},
                                  {"c", 1.0 - results[k].predicted},
                                  {"predicted_speed_error", results[k].predicted},
                                  {"measured_speed_error", results[k].measured},
                                  {"unimodal", results[k].unimodal}});
    r.tables.emplace_back("peaks_" + cases[k].tableau.name() + "_mu" + format_double(cases[k].mu) +
                              "_N" + std::to_string(results[k].iterations) + ".csv",
                          results[k].track);
  }
  r.tables.emplace_back("propagation_speed.csv", std::move(t));
  return r;
}

inline ExperimentResult shock(const json& j, int jobs) {
  const auto cases = parse_phase([&] {
    std::vector<ShockConfig> out;
    const ShockProblem prob = parse_shock_problem(j.value("problem", std::string("triangle")));
    const PseudoConfig base = parse_pseudo(j);
    ShockConfig c;
    c.problem = prob;
    c.cells = j.value("cells", c.cells);
    c.T = j.value("T", c.T);
    c.pseudo = base;
    if (j.contains("iterations")) {
      for (int N : j.at("iterations").get<std::vector<int>>()) {
        ShockConfig v = c;
        v.pseudo.schedule = PseudoSchedule::constant(base.schedule[0], N);
        out.push_back(v);
      }
    } else {
      out.push_back(c);
    }
    for (const auto& v : out) step_count(v.T, 1.0 / static_cast<double>(v.cells));
    return out;
  });
  std::vector<ShockResult> results(cases.size());
  parallel_for(cases.size(), jobs, [&](std::size_t k) { results[k] = run_shock(cases[k]); });
  ExperimentResult r{"shock", json::object(), {}};
  CsvTable t({"N", "c", "predicted_location", "measured_front", "error_original", "error_modified"});
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& s = results[k];
    const auto N = static_cast<long long>(cases[k].pseudo.schedule.size());
    t.add_row({N, s.c, s.predicted.location, s.front, s.error_original, s.error_modified});
    r.summary["runs"].push_back({{"schedule", schedule_json(cases[k].pseudo.schedule)},
                                 {"c", s.c},
                                 {"predicted_location", s.predicted.location},
                                 {"measured_front", s.front},
                                 {"error_original", s.error_original},
                                 {"error_modified", s.error_modified},
                                 {"final_mass", weighted_sum(s.grid.volumes(), s.u)}});
    r.tables.emplace_back("solution_N" + std::to_string(N) + ".csv", s.solution_csv());
  }
  r.tables.emplace_back("shock.csv", std::move(t));
  return r;
}

inline ExperimentResult strategies(const json& j) {
  const auto cfg = parse_phase([&] {
    StrategyConfig c;
    c.problem = j.value("problem", c.problem);
    c.cells = j.value("cells", c.cells);
    c.tableau = parse_tableau(j.value("tableau", json("euler")));
    if (j.contains("strategies")) c.strategies = parse_strategies(j.at("strategies"), c.tableau);
    require_equal_pseudo_time(c.strategies);
    return c;
  });
  const auto hist = run_strategies(cfg);
  std::vector<std::string> header{"iteration"};
  std::size_t rows = 0;
  for (const auto& h : hist) {
    header.push_back(h.name);
    rows = std::max(rows, h.relative_residuals.size());
  }
  CsvTable t(header);
  for (std::size_t k = 0; k < rows; ++k) {
    std::vector<CsvTable::Cell> row{static_cast<long long>(k)};
    for (const auto& h : hist)
      row.emplace_back(k < h.relative_residuals.size() ? h.relative_residuals[k]
                                                       : std::numeric_limits<double>::quiet_NaN());
    t.add_row(std::move(row));
  }
  ExperimentResult r{"strategy_residuals", json::object(), {}};
  for (const auto& h : hist)
    r.summary["strategies"].push_back({{"name", h.name}, {"c", h.c}, {"final_relative_residual", h.relative_residuals.back()}});
  r.tables.emplace_back("strategy_residuals.csv", std::move(t));
  return r;
}

inline ExperimentResult vortex(const json& j, int jobs) {
  const auto cfg = parse_phase([&] {
    VortexConfig c;
    c.dx = j.value("dx", c.dx);
    c.dt = j.value("dt", c.dt);
    c.T = j.value("T", c.T);
    c.tableau = parse_tableau(j.value("tableau", json("euler")));
    if (j.contains("strategies")) c.strategies = parse_strategies(j.at("strategies"), c.tableau);
    vortex_grid(c.dx);
    step_count(c.T, c.dt);
    return c;
  });
  const auto runs = run_vortex(cfg, jobs);
  ExperimentResult r{"euler_vortex", json::object(), {}};
  CsvTable t({"strategy", "c", "center_x", "predicted_x", "mass_drift", "error_original", "error_modified"});
  for (const auto& v : runs) {
    t.add_row({v.name, v.c, v.center_x, v.c * cfg.T, v.mass_drift, v.error_original, v.error_modified});
    r.summary["strategies"].push_back({{"name", v.name},
                                       {"c", v.c},
                                       {"center_x", v.center_x},
                                       {"relative_density_mass_drift", v.mass_drift},
                                       {"error_original", v.error_original},
                                       {"error_modified", v.error_modified}});
    r.tables.emplace_back("vortex_track_" + v.name + ".csv", v.track);
  }
  r.tables.emplace_back("vortex.csv", std::move(t));
  return r;
}

}  // namespace detail

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"table1",           "table2", "mass_history",
                                          "convergence",      "propagation_speed",
                                          "shock",            "strategy_residuals",
                                          "euler_vortex"};
  return k;
}

/// Dispatch on the "experiment" key. Throws SpecError before any computation on bad input.
inline ExperimentResult run_experiment(const json& spec, int jobs = 1) {
  if (!spec.is_object()) throw SpecError("experiment document must be a JSON object");
  const std::string kind = detail::parse_phase([&] { return spec.at("experiment").get<std::string>(); });
  if (kind == "table1") return detail::table1(spec);
  if (kind == "table2") return detail::table2(spec);
  if (kind == "mass_history") return detail::mass_history(spec, jobs);
  if (kind == "convergence") return detail::convergence(spec, jobs);
  if (kind == "propagation_speed") return detail::speed(spec, jobs);
  if (kind == "shock") return detail::shock(spec, jobs);
  if (kind == "strategy_residuals") return detail::strategies(spec);
  if (kind == "euler_vortex") return detail::vortex(spec, jobs);
  throw SpecError("unknown experiment '" + kind + "'");
}

}  // namespace conserva
