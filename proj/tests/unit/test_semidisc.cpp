#include "catch_amalgamated.hpp"

#include "conserva/linear_solvers.hpp"
#include "conserva/semidisc.hpp"

#include <cmath>
#include <random>

using namespace conserva;
using Catch::Matchers::WithinAbs;

namespace {

Vector random_state(Index m, unsigned seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Vector v(m);
  for (auto& x : v) x = d(rng);
  return v;
}

template <class Flux>
Matrix fd_jacobian(const Semidisc1D<Flux>& s, const Vector& u, double h = 1e-7) {
  const Index m = u.size();
  Matrix J(m, m);
  for (Index j = 0; j < m; ++j) {
    Vector up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    J.col(j) = (s.divergence(up) - s.divergence(dn)) / (2 * h);
  }
  return J;
}

}  // namespace

TEST_CASE("flux divergence telescopes") {
  const Grid1D g(0, 1, 23);
  const Vector u = random_state(23, 1, 0.1, 2.0);
  for (ScalarFlux f : {ScalarFlux(CentralAdvection{}), ScalarFlux(UpwindAdvection{}),
                       ScalarFlux(UpwindBurgers{})}) {
    const Semidisc1D<> s(g, f);
    CHECK_THAT(weighted_sum(g.volumes(), s.rhs(u)), WithinAbs(0.0, 1e-13));
  }
}

TEST_CASE("analytic Jacobian matches finite differences") {
  const Grid1D g(-1, 1, 12);
  const Vector u = random_state(12, 2, 0.2, 1.5);
  for (ScalarFlux f : {ScalarFlux(CentralAdvection{}), ScalarFlux(UpwindBurgers{})}) {
    const Semidisc1D<> s(g, f);
    CHECK((s.divergence_jacobian(u) - fd_jacobian(s, u)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("central advection operator pattern") {
  // fhat = dx * D gives Tridiag(-1/2, 0, 1/2) with periodic corners
  const Grid1D g(-1.5, 1.5, 6);
  const Semidisc1D<> s(g, CentralAdvection{});
  const ImplicitEulerSystem<> sys(s, 0.5, Vector::Zero(6), FluxScaling::flux_difference);
  const Matrix A = sys.fhat_jacobian(Vector::Zero(6));
  for (Index j = 0; j < 6; ++j) {
    Vector e = Vector::Zero(6);
    e[j] = 1;
    const Vector col = sys.fhat(e);
    CHECK((col - A.col(j)).norm() < 1e-15);
    CHECK(col[j] == 0.0);
    CHECK_THAT(col[g.wrap(j + 1)], WithinAbs(-0.5, 1e-15));
    CHECK_THAT(col[g.wrap(j - 1)], WithinAbs(0.5, 1e-15));
  }
  CHECK(sys.alpha() == -1.0);
}

TEST_CASE("exact implicit step conserves mass and zeroes the residual") {
  const Grid1D g(0, 1, 16);
  const Vector un = random_state(16, 4);
  const ImplicitEulerSystem<> sys(Semidisc1D<>(g, CentralAdvection{}), 0.03, un,
                                  FluxScaling::flux_difference);
  const Matrix A = sys.fhat_jacobian(un);
  const Vector u = direct_solve(sys.jacobian(un), un);
  CHECK((u - direct_solve(Matrix(Matrix::Identity(16, 16) - sys.alpha() * A), un)).norm() < 1e-14);
  CHECK_THAT(sys.mass_error(u), WithinAbs(0.0, 1e-14));
  CHECK(sys.norm(sys.g_eval(u)) < 1e-12);
  CHECK(sys.norm(sys.implicit_residual(u)) < 1e-14);
}

TEST_CASE("residual form matches implicit residual") {
  const Grid1D g(0, 2, 10);
  const Vector un = random_state(10, 5, 0.1, 1.0);
  const Vector u = random_state(10, 6, 0.1, 1.0);
  const ImplicitEulerSystem<> sys(Semidisc1D<>(g, UpwindBurgers{}), 0.07, un);
  CHECK((sys.implicit_residual(u) + sys.time_step() * sys.g_eval(u)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("inflow pinning") {
  const Grid1D g(0, 1, 8);
  ImplicitEulerSystem<> sys(Semidisc1D<>(g, UpwindBurgers{}), 0.1, Vector::Zero(8));
  sys.set_inflow(1.0);
  Vector u = Vector::Zero(8);
  sys.constrain(u);
  CHECK(u[0] == 1.0);
  CHECK(sys.g_eval(u)[0] == 0.0);
  CHECK(sys.implicit_residual(u)[0] == 0.0);
}

TEST_CASE("Euler semidiscretisation telescopes") {
  const Grid2D g(0, 2, 8, 0, 1, 6);
  const EulerSemidisc2D s(g);
  const EulerGas gas;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-0.1, 0.1);
  Vector u(g.cells() * 4);
  for (Index c = 0; c < g.cells(); ++c) {
    const EulerState w = gas.from_primitive(1 + d(rng), 0.5 + d(rng), d(rng), 1 + d(rng));
    for (int k = 0; k < 4; ++k) u[c * 4 + k] = w[k];
  }
  const Vector r = s.rhs(u);
  for (int k = 0; k < 4; ++k) CHECK_THAT(weighted_sum(g.volumes(), r, 4, k), WithinAbs(0.0, 1e-13));

  // a uniform flow is steady
  Vector uniform(g.cells() * 4);
  const EulerState w = gas.from_primitive(1, 0.3, 0.2, 1);
  for (Index c = 0; c < g.cells(); ++c)
    for (int k = 0; k < 4; ++k) uniform[c * 4 + k] = w[k];
  CHECK(s.rhs(uniform).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("semidisc rejects bad states") {
  const Grid1D g(0, 1, 4);
  const Semidisc1D<> s(g, UpwindAdvection{});
  StateField u(g);
  u(2) = std::nan("");
  CHECK_THROWS_AS(s.rhs(u), std::domain_error);
  CHECK_THROWS_AS(s.rhs(StateField(Grid1D(0, 1, 5))), std::invalid_argument);
  CHECK_THROWS_AS(ImplicitEulerSystem<>(s, 0.0, Vector::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(ImplicitEulerSystem<>(s, 0.1, Vector::Zero(3)), std::invalid_argument);
}
