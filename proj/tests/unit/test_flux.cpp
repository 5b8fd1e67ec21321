#include "catch_amalgamated.hpp"

#include "conserva/flux.hpp"

#include <array>

using namespace conserva;
using Catch::Matchers::WithinAbs;

TEST_CASE("numerical fluxes are consistent") {
  CHECK(consistency_defect(CentralAdvection{}, -2, 2, 500) == 0.0);
  CHECK(consistency_defect(UpwindAdvection{}, -2, 2, 500) == 0.0);
  CHECK(consistency_defect(UpwindBurgers{}, 0, 2, 500) == 0.0);
}

TEST_CASE("numerical fluxes are Lipschitz") {
  CHECK(lipschitz_estimate(CentralAdvection{}, -1, 1, 200) <= 0.5 + 1e-6);
  CHECK(lipschitz_estimate(UpwindAdvection{}, -1, 1, 200) <= 1.0 + 1e-6);
  CHECK(lipschitz_estimate(UpwindBurgers{}, 0, 1, 200) <= 1.0 + 1e-5);
}

TEST_CASE("flux values") {
  CHECK(central_advection(1.0, 3.0) == 2.0);
  CHECK(upwind_advection(-4.0) == -4.0);
  CHECK(upwind_burgers(3.0) == 4.5);
  const ScalarFlux f = ScalarFlux::from_name("upwind_burgers");
  const std::array<double, 1> w{2.0};
  CHECK(f(w) == 2.0);
  CHECK(f.name() == "upwind_burgers");
  CHECK_THROWS_AS(ScalarFlux::from_name("roe"), std::invalid_argument);
}

TEST_CASE("Euler pressure") {
  const EulerGas gas;
  // (rho, rho u, rho v, rho E) = (1, 1, 0, 2): p = 0.4 * (2 - 0.5)
  CHECK_THAT(gas.pressure({1, 1, 0, 2}), WithinAbs(0.6, 1e-15));
  CHECK_THROWS_AS(gas.pressure({0, 0, 0, 1}), std::domain_error);
  CHECK_THROWS_AS(gas.pressure({1, 2, 0, 1}), std::domain_error);
  const EulerState w = gas.from_primitive(1.2, 0.3, -0.1, 0.9);
  CHECK_THAT(gas.pressure(w), WithinAbs(0.9, 1e-14));
}

TEST_CASE("centered fourth-order flux") {
  const EulerState a{1, 0, 0, 0}, b{0, 1, 0, 0}, c{0, 0, 1, 0}, d{0, 0, 0, 1};
  const EulerState h = centered4(a, b, c, d);
  CHECK_THAT(h[0], WithinAbs(-1.0 / 12, 1e-16));
  CHECK_THAT(h[1], WithinAbs(7.0 / 12, 1e-16));
  CHECK_THAT(h[2], WithinAbs(7.0 / 12, 1e-16));
  CHECK_THAT(h[3], WithinAbs(-1.0 / 12, 1e-16));

  // consistent: equal neighbours reproduce the physical flux
  const EulerGas gas;
  const EulerState w = gas.from_primitive(1.0, 0.5, 0.25, 1.0);
  const EulerState f = gas.flux(w, 0);
  const EulerState hw = centered4_euler(w, w, w, w, 0);
  for (int k = 0; k < 4; ++k) CHECK_THAT(hw[k], WithinAbs(f[k], 1e-14));
}

TEST_CASE("stagnant gas carries only pressure") {
  const EulerGas gas;
  const EulerState w = gas.from_primitive(1.0, 0.0, 0.0, 2.0);
  const EulerState fx = gas.flux(w, 0);
  const EulerState fy = gas.flux(w, 1);
  CHECK(fx[0] == 0.0);
  CHECK_THAT(fx[1], WithinAbs(2.0, 1e-14));
  CHECK(fx[2] == 0.0);
  CHECK(fx[3] == 0.0);
  CHECK_THAT(fy[2], WithinAbs(2.0, 1e-14));
  CHECK_THROWS_AS(gas.flux(w, 2), std::invalid_argument);
}
