#include "catch_amalgamated.hpp"

#include "conserva/csv.hpp"
#include "conserva/grid.hpp"

#include <cmath>
#include <random>

using namespace conserva;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid geometry") {
  const Grid1D g(-1.5, 1.5, 6);
  CHECK(g.dx() == 0.5);
  CHECK(g.node(0) == -1.5);
  CHECK(g.node(5) == 1.0);
  CHECK(g.center(0) == -1.25);
  CHECK(g.wrap(-1) == 5);
  CHECK(g.wrap(6) == 0);
  CHECK(g.wrap(13) == 1);
  CHECK(g.coarsened().cells() == 3);
  CHECK_THROWS_AS(Grid1D(0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(1, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(0, 1, 5).coarsened(), std::invalid_argument);
}

TEST_CASE("mass of a constant field is the domain length") {
  const Grid1D g(-1.5, 1.5, 6);
  const StateField u = sample(g, [](double) { return 1.0; });
  CHECK_THAT(total_mass(u), WithinAbs(3.0, 1e-15));
}

TEST_CASE("mass of the sampled pulse") {
  // 0.5 * sum over the six nodes of exp(-50 x^2), summed by hand
  const StateField u = sample(Grid1D(-1.5, 1.5, 6), [](double x) { return std::exp(-50 * x * x); });
  CHECK_THAT(total_mass(u), WithinRel(0.500003726653172, 1e-15));
}

TEST_CASE("mass is linear") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  const Grid1D g(0.0, 2.0, 17);
  for (int trial = 0; trial < 20; ++trial) {
    StateField u(g), v(g);
    for (Index i = 0; i < g.cells(); ++i) {
      u(i) = n(rng);
      v(i) = n(rng);
    }
    const double a = n(rng), b = n(rng);
    const StateField w(g, Vector(a * u.values() + b * v.values()));
    CHECK_THAT(total_mass(w), WithinAbs(a * total_mass(u) + b * total_mass(v), 1e-12));
  }
}

TEST_CASE("periodic access and component errors") {
  StateField u(Grid1D(0, 1, 4), 2);
  u(1, 1) = 7.0;
  CHECK(u.at(5, 1) == 7.0);
  CHECK(u.at(-3, 1) == 7.0);
  CHECK_THROWS_AS(total_mass(u, 2), std::out_of_range);
  CHECK_THROWS_AS(StateField(Grid1D(0, 1, 4), Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(mass_error(u, StateField(Grid1D(0, 1, 8), 2)), std::invalid_argument);
}

TEST_CASE("2D grid mass") {
  const Grid2D g(0, 2, 4, 0, 1, 5);
  StateField u(g, 4);
  for (Index c = 0; c < g.cells(); ++c) u(c, 0) = 1.0;
  CHECK_THAT(total_mass(u, 0), WithinAbs(2.0, 1e-14));
  CHECK(total_mass(u, 3) == 0.0);
  CHECK(g.flat(-1, 0) == g.flat(3, 0));
}

TEST_CASE("csv round trip formatting") {
  CsvTable t({"a", "b"});
  t.add_row({0.1, static_cast<long long>(3)});
  CHECK(t.str() == "a,b\n0.1,3\n");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_THROWS(t.add_row({1.0}));
}
