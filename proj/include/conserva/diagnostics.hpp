#pragma once

// Exact solutions of the original (c = 1) and modified (u_t + c f_x = 0) laws,
// error norms, peak tracking and shock-front measurement.

#include "conserva/csv.hpp"
#include "conserva/flux.hpp"
#include "conserva/grid.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace conserva {

class ExactSolution {
 public:
  using Rule = std::function<double(double x, double t)>;

  ExactSolution(std::string name, double c, Rule rule)
      : name_(std::move(name)), c_(c), rule_(std::move(rule)) {}

  const std::string& name() const { return name_; }
  /// Flux scaling of the law this solves; 1 for the original law.
  double c() const { return c_; }
  bool is_original() const { return c_ == 1.0; }
  double operator()(double x, double t) const { return rule_(x, t); }

  /// exp(-k x^2) transported with speed c on the periodic interval (a, b].
  static ExactSolution advection_pulse(double a, double b, double c, double k = 50.0) {
    return {"advection_pulse", c, [=](double x, double t) {
              const double L = b - a;
              double s = x - c * t - a;
              s -= L * std::floor(s / L);
              // s in [0, L); the pulse is centred at 0, so fold onto (a, b].
              double y = a + s;
              if (y <= a) y += L;
              if (y > b) y -= L;
              return std::exp(-k * y * y);
            }};
  }

  /// u(x,0) = x on [0, 1/2], 0 elsewhere; u = x/(ct+1) behind the tip (1/2) sqrt(ct+1).
  static ExactSolution burgers_triangle(double c) {
    return {"burgers_triangle", c, [=](double x, double t) {
              const double s = c * t + 1.0;
              return (x <= 0.5 * std::sqrt(s)) ? x / s : 0.0;
            }};
  }

  /// Unit step initially at x0 moving with the Rankine-Hugoniot speed c/2.
  static ExactSolution burgers_step(double c, double x0 = 0.24) {
    return {"burgers_step", c,
            [=](double x, double t) { return x <= x0 + 0.5 * c * t ? 1.0 : 0.0; }};
  }

 private:
  std::string name_;
  double c_;
  Rule rule_;
};

/// Samples the exact solution at the grid nodes, matching the initial data.
inline Vector sample_exact(const Grid1D& grid, const ExactSolution& exact, double t) {
  Vector v(grid.cells());
  for (Index i = 0; i < grid.cells(); ++i) v[i] = exact(grid.node(i), t);
  return v;
}

/// sqrt(sum_i |Omega_i| (u_i - u(x_i, t))^2)
inline double l2_error(const Grid1D& grid, const Vector& u, const ExactSolution& exact, double t) {
  if (u.size() != grid.cells()) throw std::invalid_argument("l2_error: size mismatch");
  double acc = 0.0;
  for (Index i = 0; i < grid.cells(); ++i) {
    const double d = u[i] - exact(grid.node(i), t);
    acc += grid.volume(i) * d * d;
  }
  return std::sqrt(acc);
}

inline double l2_error(const StateField& u, const ExactSolution& exact, double t) {
  if (!u.is_1d() || u.components() != 1)
    throw std::invalid_argument("l2_error: scalar 1D field required");
  return l2_error(u.grid1d(), u.values(), exact, t);
}

/// Location of the maximum, refined by a parabola through the largest cell and its neighbours.
inline double peak_position(const Grid1D& grid, const Vector& u) {
  Index i = 0;
  u.maxCoeff(&i);
  const double l = u[grid.wrap(i - 1)];
  const double c = u[i];
  const double r = u[grid.wrap(i + 1)];
  const double den = l - 2.0 * c + r;
  const double shift = den < 0.0 ? 0.5 * (l - r) / den : 0.0;
  return grid.node(i) + shift * grid.dx();
}

/// Number of strict local maxima above `fraction` of the global maximum (periodic).
inline int count_peaks(const Vector& u, double fraction = 0.5) {
  const Index m = u.size();
  const double level = fraction * u.maxCoeff();
  int peaks = 0;
  for (Index i = 0; i < m; ++i) {
    const double l = u[(i + m - 1) % m];
    const double r = u[(i + 1) % m];
    if (u[i] > level && u[i] > l && u[i] >= r) ++peaks;
  }
  return peaks;
}

struct SpeedMeasurement {
  double speed = 0.0;
  bool unimodal = true;
};

/// Tracks a single periodic pulse and fits its propagation speed.
class PeakTracker {
 public:
  explicit PeakTracker(Grid1D grid) : grid_(std::move(grid)) {}

  void observe(double t, const Vector& u) {
    if (count_peaks(u) != 1) unimodal_ = false;
    const double L = grid_.length();
    double p = peak_position(grid_, u);
    if (!x_.empty()) {
      // minimal-displacement continuation across the periodic seam
      const double prev = x_.back();
      p += L * std::round((prev - p) / L);
    }
    t_.push_back(t);
    x_.push_back(p);
  }

  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& positions() const { return x_; }

  SpeedMeasurement measure() const {
    SpeedMeasurement m;
    m.unimodal = unimodal_;
    m.speed = least_squares_slope(t_, x_);
    return m;
  }

  CsvTable to_csv() const {
    CsvTable t({"t", "peak_x"});
    for (std::size_t k = 0; k < t_.size(); ++k) t.add_row({t_[k], x_[k]});
    return t;
  }

  static double least_squares_slope(const std::vector<double>& t, const std::vector<double>& x) {
    if (t.size() < 2 || t.size() != x.size())
      throw std::invalid_argument("speed measurement needs at least two samples");
    const double n = static_cast<double>(t.size());
    double st = 0, sx = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      st += t[k];
      sx += x[k];
    }
    const double tm = st / n, xm = sx / n;
    double num = 0, den = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      num += (t[k] - tm) * (x[k] - xm);
      den += (t[k] - tm) * (t[k] - tm);
    }
    if (den == 0.0) throw std::invalid_argument("speed measurement needs distinct times");
    return num / den;
  }

 private:
  Grid1D grid_;
  std::vector<double> t_;
  std::vector<double> x_;
  bool unimodal_ = true;
};

/// Speed from an already unwrapped or raw periodic peak series.
inline SpeedMeasurement measure_speed(const std::vector<double>& t, std::vector<double> x,
                                      double period) {
  for (std::size_t k = 1; k < x.size(); ++k) x[k] += period * std::round((x[k - 1] - x[k]) / period);
  return {PeakTracker::least_squares_slope(t, x), true};
}

enum class ShockProblem { triangle, step };

struct ShockPrediction {
  double location = 0.0;
  double height = 0.0;
};

inline ShockPrediction shock_predictions(ShockProblem problem, double c, double t) {
  if (t < 0.0) throw std::invalid_argument("shock_predictions: t must be nonnegative");
  if (problem == ShockProblem::triangle) {
    const double s = c * t + 1.0;
    const double tip = 0.5 * std::sqrt(s);
    return {tip, tip / s};
  }
  return {0.24 + 0.5 * c * t, 1.0};
}

/// Node of the last cell whose value exceeds `threshold`; NaN if none does.
inline double shock_front(const Grid1D& grid, const Vector& u, double threshold) {
  for (Index i = grid.cells(); i-- > 0;)
    if (u[i] > threshold) return grid.node(i);
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Isentropic vortex

struct IsentropicVortex {
  double gamma = 1.4;
  double epsilon = 5.0;
  double mach = 0.5;

  /// Primitive (rho, u, v, p) of the vortex centred at the origin.
  std::array<double, 4> primitive(double x, double y) const {
    const double r = 1.0 - x * x - y * y;
    const double pi = std::numbers::pi;
    const double rho = std::pow(
        1.0 - epsilon * epsilon * (gamma - 1.0) * mach * mach / (8.0 * pi * pi) * std::exp(r),
        1.0 / (gamma - 1.0));
    const double u = 1.0 - epsilon * y / (2.0 * pi) * std::exp(0.5 * r);
    const double v = epsilon * x / (2.0 * pi) * std::exp(0.5 * r);
    const double p = std::pow(rho, gamma) / (gamma * mach * mach);
    return {rho, u, v, p};
  }

  /// Far-field density, reached where exp(r) vanishes.
  double far_field_density() const { return 1.0; }

  /// Conserved field on the grid with the vortex centre shifted to (cx, 0), periodically.
  Vector conserved(const Grid2D& grid, double cx = 0.0) const {
    const EulerGas gas{gamma};
    Vector out(grid.cells() * 4);
    const double Lx = grid.x().length();
    for (Index i = 0; i < grid.mx(); ++i)
      for (Index j = 0; j < grid.my(); ++j) {
        double x = grid.x().node(i) - cx;
        x -= Lx * std::round(x / Lx);
        const double y = grid.y().node(j);
        const auto [rho, u, v, p] = primitive(x, y);
        if (!(rho > 0.0)) throw std::domain_error("vortex initial density is not positive");
        const EulerState w = gas.from_primitive(rho, u, v, p);
        const Index c = grid.flat(i, j);
        for (int k = 0; k < 4; ++k) out[c * 4 + k] = w[k];
      }
    return out;
  }
};

/// Position of the density minimum, x refined by a parabola along the row.
inline std::array<double, 2> vortex_center(const Grid2D& grid, const Vector& u) {
  Index best = 0;
  for (Index c = 1; c < grid.cells(); ++c)
    if (u[c * 4] < u[best * 4]) best = c;
  const Index i = best / grid.my();
  const Index j = best % grid.my();
  auto rho = [&](Index ii, Index jj) { return u[grid.flat(ii, jj) * 4]; };
  auto refine = [](double l, double c, double r) {
    const double den = l - 2.0 * c + r;
    return den > 0.0 ? 0.5 * (l - r) / den : 0.0;
  };
  const double x = grid.x().node(i) + refine(rho(i - 1, j), rho(i, j), rho(i + 1, j)) * grid.dx();
  const double y = grid.y().node(j) + refine(rho(i, j - 1), rho(i, j), rho(i, j + 1)) * grid.dy();
  return {x, y};
}

/// Volume-weighted L2 norm of the density difference.
inline double density_l2_error(const Grid2D& grid, const Vector& u, const Vector& exact) {
  double acc = 0.0;
  for (Index c = 0; c < grid.cells(); ++c) {
    const double d = u[c * 4] - exact[c * 4];
    acc += grid.volume(c) * d * d;
  }
  return std::sqrt(acc);
}

/// Running record of |mass(u^n) - mass(u^0)| over a whole simulation. The
/// scaled drift divides by 1 + sum_i |Omega_i| |u_i|, the size of the round-off
/// floor of the mass sum, which matters once an unstable iteration blows up.
class MassAudit {
 public:
  explicit MassAudit(double initial) : initial_(initial) {}

  void observe(double t, double mass, double absolute_mass = 0.0) {
    const double d = mass - initial_;
    t_.push_back(t);
    drift_.push_back(d);
    worst_ = std::max(worst_, std::abs(d));
    worst_scaled_ = std::max(worst_scaled_, std::abs(d) / (1.0 + absolute_mass));
    largest_ = std::max(largest_, absolute_mass);
  }

  double initial() const { return initial_; }
  double max_drift() const { return worst_; }
  double max_scaled_drift() const { return worst_scaled_; }
  double largest_absolute_mass() const { return largest_; }
  const std::vector<double>& drift() const { return drift_; }

  CsvTable to_csv() const {
    CsvTable t({"t", "mass_error"});
    for (std::size_t k = 0; k < t_.size(); ++k) t.add_row({t_[k], drift_[k]});
    return t;
  }

 private:
  double initial_;
  double worst_ = 0.0;
  double worst_scaled_ = 0.0;
  double largest_ = 0.0;
  std::vector<double> t_;
  std::vector<double> drift_;
};

}  // namespace conserva
