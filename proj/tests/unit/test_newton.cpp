#include "catch_amalgamated.hpp"

#include "conserva/newton.hpp"

#include <cmath>

using namespace conserva;
using Catch::Matchers::WithinAbs;

namespace {

ImplicitEulerSystem<> advection_system(Index m, double dt) {
  const Grid1D g(-1.5, 1.5, m);
  Vector un(m);
  for (Index i = 0; i < m; ++i) un[i] = std::exp(-50 * g.node(i) * g.node(i));
  return {Semidisc1D<>(g, CentralAdvection{}), dt, un, FluxScaling::flux_difference};
}

ImplicitEulerSystem<> burgers_system(Index m, double dt) {
  const Grid1D g(-1.5, 1.5, m);
  Vector un(m);
  for (Index i = 0; i < m; ++i) un[i] = std::exp(-g.node(i) * g.node(i));
  return {Semidisc1D<>(g, UpwindBurgers{}), dt, un};
}

}  // namespace

TEST_CASE("one exact Newton step solves a linear problem") {
  const auto sys = advection_system(24, 0.125);
  const auto r = newton_solve(sys, sys.previous(), NewtonConfig{});
  const Vector direct = direct_solve(sys.jacobian(sys.previous()), sys.previous());
  CHECK((r.u - direct).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(r.trace.back().residual < 1e-13);
}

TEST_CASE("Newton converges quadratically on Burgers") {
  const auto sys = burgers_system(40, 0.5);
  NewtonConfig cfg;
  cfg.outer = 5;
  const auto r = newton_solve(sys, sys.previous(), cfg);
  const auto& e = r.trace.entries();
  REQUIRE(e.size() == 6);
  CHECK(e.back().residual < 1e-13);
  for (int k = 2; k <= 3; ++k) CHECK(e[k + 1].residual <= 10 * e[k].residual * e[k].residual);
  for (const auto& x : e) CHECK(std::abs(x.mass_error) < 1e-13);
}

TEST_CASE("conservative inner solvers keep Newton iterates conservative") {
  const auto sys = burgers_system(16, 0.2);
  for (auto s : {InnerSolver::exact, InnerSolver::richardson, InnerSolver::gmres,
                 InnerSolver::cgc, InnerSolver::heun}) {
    NewtonConfig cfg;
    cfg.inner = s;
    cfg.outer = 3;
    cfg.inner_iterations = 3;
    const auto r = newton_solve(sys, sys.previous(), cfg);
    INFO(to_string(s));
    CHECK(r.trace.max_abs_mass_error() < 1e-13);
  }
}

TEST_CASE("Gauss-Seidel inner solves lose mass") {
  const auto sys = advection_system(6, 0.5);
  NewtonConfig cfg;
  cfg.inner = InnerSolver::gauss_seidel;
  const auto r = newton_solve(sys, sys.previous(), cfg);
  CHECK(std::abs(r.trace.back().mass_error) > 1e-3);
  CHECK_THAT(r.inner.front().back().predicted_error, WithinAbs(r.trace.back().mass_error, 1e-14));
}

TEST_CASE("solver names") {
  for (auto s : {InnerSolver::exact, InnerSolver::richardson, InnerSolver::jacobi,
                 InnerSolver::gauss_seidel, InnerSolver::gmres, InnerSolver::cgc, InnerSolver::heun})
    CHECK(inner_solver_from_name(to_string(s)) == s);
  CHECK_THROWS_AS(inner_solver_from_name("sor"), std::invalid_argument);
  NewtonConfig bad;
  bad.outer = 0;
  CHECK_THROWS_AS(newton_solve(burgers_system(4, 0.1), Vector::Zero(4), bad), std::invalid_argument);
}
