#include "catch_amalgamated.hpp"

#include "conserva/diagnostics.hpp"

#include <cmath>

using namespace conserva;
using Catch::Matchers::WithinAbs;

TEST_CASE("exact solutions at t = 0 match the initial data") {
  const Grid1D g(-1, 1, 40);
  const auto pulse = ExactSolution::advection_pulse(-1, 1, 0.7);
  const Vector u0 = sample(g, [](double x) { return std::exp(-50 * x * x); }).values();
  CHECK(l2_error(g, u0, pulse, 0.0) == 0.0);
  const Grid1D h(0, 1, 25);
  const Vector tri = sample(h, [](double x) { return x <= 0.5 ? x : 0.0; }).values();
  CHECK(l2_error(h, tri, ExactSolution::burgers_triangle(0.9), 0.0) == 0.0);
}

TEST_CASE("advected pulse wraps periodically") {
  const auto pulse = ExactSolution::advection_pulse(-1, 1, 1.0);
  CHECK_THAT(pulse(0.5, 0.5), WithinAbs(1.0, 1e-15));
  CHECK_THAT(pulse(-0.5, 1.5), WithinAbs(1.0, 1e-15));
  CHECK_THAT(pulse(0.3, 4.3), WithinAbs(1.0, 1e-14));
  CHECK(pulse.is_original());
  CHECK_FALSE(ExactSolution::advection_pulse(-1, 1, 0.5).is_original());
}

TEST_CASE("shock predictions") {
  const auto t = shock_predictions(ShockProblem::triangle, 1.0, 3.0);
  CHECK_THAT(t.location, WithinAbs(1.0, 1e-15));
  CHECK_THAT(t.height, WithinAbs(0.25, 1e-15));
  const auto s = shock_predictions(ShockProblem::step, 0.5, 1.0);
  CHECK_THAT(s.location, WithinAbs(0.49, 1e-15));
  CHECK_THROWS_AS(shock_predictions(ShockProblem::step, 1.0, -1.0), std::invalid_argument);

  const Grid1D g(0, 1, 10);
  Vector u = Vector::Zero(10);
  u.head(4).setOnes();
  CHECK_THAT(shock_front(g, u, 0.5), WithinAbs(0.3, 1e-15));
  CHECK(std::isnan(shock_front(g, Vector::Zero(10), 0.5)));
}

TEST_CASE("peak tracking across the seam") {
  const Grid1D g(0, 1, 50);
  PeakTracker tracker(g);
  const double speed = 0.37;
  for (int n = 0; n <= 20; ++n) {
    const double t = 0.25 * n;
    const double centre = std::fmod(0.1 + speed * t, 1.0);
    Vector u(50);
    for (Index i = 0; i < 50; ++i) {
      double d = g.node(i) - centre;
      d -= std::round(d);
      u[i] = std::exp(-200 * d * d);
    }
    tracker.observe(t, u);
  }
  const auto m = tracker.measure();
  CHECK(m.unimodal);
  CHECK_THAT(m.speed, WithinAbs(speed, 2e-3));
  CHECK(tracker.to_csv().size() == 21);
}

TEST_CASE("peak counting") {
  Vector u(8);
  u << 0, 1, 0, 0, 0.9, 0, 0, 0;
  CHECK(count_peaks(u) == 2);
  CHECK(count_peaks(u, 0.95) == 1);
  CHECK_THAT(measure_speed({0, 1, 2}, {0.9, 0.1, 0.3}, 1.0).speed, WithinAbs(0.2, 1e-12));
}

TEST_CASE("mass audit") {
  MassAudit a(2.0);
  a.observe(0.1, 2.0 + 1e-3, 1.0);
  a.observe(0.2, 2.0 - 3e-3, 3.0);
  CHECK_THAT(a.max_drift(), WithinAbs(3e-3, 1e-15));
  CHECK_THAT(a.max_scaled_drift(), WithinAbs(7.5e-4, 1e-15));
  CHECK(a.largest_absolute_mass() == 3.0);
  CHECK(a.to_csv().size() == 2);
}

TEST_CASE("isentropic vortex initial data") {
  const IsentropicVortex v;
  const auto far = v.primitive(20.0, 0.0);
  CHECK_THAT(far[0], WithinAbs(v.far_field_density(), 1e-12));
  CHECK_THAT(far[1], WithinAbs(1.0, 1e-12));
  const auto core = v.primitive(0.0, 0.0);
  CHECK(core[0] > 0.0);
  CHECK(core[0] < far[0]);
  CHECK(core[2] == 0.0);

  const Grid2D g(-5, 15, 50, -5, 5, 25);
  const Vector u = v.conserved(g, 3.0);
  const auto c = vortex_center(g, u);
  CHECK_THAT(c[0], WithinAbs(3.0, 0.2));
  CHECK_THAT(c[1], WithinAbs(0.0, 0.2));
  CHECK(density_l2_error(g, u, u) == 0.0);
  // the centre wraps around the periodic x direction
  const Vector w = v.conserved(g, 23.0);
  CHECK(density_l2_error(g, u, w) < 1e-12);
}
