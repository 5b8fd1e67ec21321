#pragma once

// Physical and numerical fluxes. A scalar numerical flux reads the stencil
// (w_{i-p}, ..., w_{i+q}) and returns fhat_{i+1/2}.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace conserva {

template <class F>
concept ScalarNumericalFlux = requires(const F& f, std::span<const double> w, std::span<double> dw,
                                       double u) {
  { f.left() } -> std::convertible_to<int>;
  { f.right() } -> std::convertible_to<int>;
  { f(w) } -> std::convertible_to<double>;
  { f.gradient(w, dw) };
  { f.physical(u) } -> std::convertible_to<double>;
};

/// Central flux for u_t + u_x = 0: (w_i + w_{i+1}) / 2. Assembles to
/// A = Tridiag(-1/2, 0, 1/2) with periodic wrap.
struct CentralAdvection {
  static constexpr std::string_view name = "central_advection";
  int left() const { return 0; }
  int right() const { return 1; }
  double operator()(std::span<const double> w) const { return 0.5 * (w[0] + w[1]); }
  void gradient(std::span<const double>, std::span<double> dw) const {
    dw[0] = 0.5;
    dw[1] = 0.5;
  }
  double physical(double u) const { return u; }
};

struct UpwindAdvection {
  static constexpr std::string_view name = "upwind_advection";
  int left() const { return 0; }
  int right() const { return 0; }
  double operator()(std::span<const double> w) const { return w[0]; }
  void gradient(std::span<const double>, std::span<double> dw) const { dw[0] = 1.0; }
  double physical(double u) const { return u; }
};

/// Upwind flux for Burgers' equation, valid for nonnegative states.
struct UpwindBurgers {
  static constexpr std::string_view name = "upwind_burgers";
  int left() const { return 0; }
  int right() const { return 0; }
  double operator()(std::span<const double> w) const { return 0.5 * w[0] * w[0]; }
  void gradient(std::span<const double> w, std::span<double> dw) const { dw[0] = w[0]; }
  double physical(double u) const { return 0.5 * u * u; }
};

inline double central_advection(double wi, double wip1) {
  const double w[] = {wi, wip1};
  return CentralAdvection{}(w);
}
inline double upwind_advection(double wi) { return wi; }
inline double upwind_burgers(double wi) { return 0.5 * wi * wi; }

/// Runtime-selected scalar flux.
class ScalarFlux {
 public:
  using Variant = std::variant<CentralAdvection, UpwindAdvection, UpwindBurgers>;

  ScalarFlux() = default;
  template <class F>
    requires std::constructible_from<Variant, F>
  ScalarFlux(F f) : f_(f) {}

  static ScalarFlux from_name(std::string_view name) {
    if (name == CentralAdvection::name) return CentralAdvection{};
    if (name == UpwindAdvection::name) return UpwindAdvection{};
    if (name == UpwindBurgers::name) return UpwindBurgers{};
    throw std::invalid_argument("unknown numerical flux '" + std::string(name) + "'");
  }

  std::string_view name() const {
    return std::visit([](const auto& f) { return std::decay_t<decltype(f)>::name; }, f_);
  }
  int left() const { return std::visit([](const auto& f) { return f.left(); }, f_); }
  int right() const { return std::visit([](const auto& f) { return f.right(); }, f_); }
  double operator()(std::span<const double> w) const {
    return std::visit([&](const auto& f) { return f(w); }, f_);
  }
  void gradient(std::span<const double> w, std::span<double> dw) const {
    std::visit([&](const auto& f) { f.gradient(w, dw); }, f_);
  }
  double physical(double u) const {
    return std::visit([&](const auto& f) { return f.physical(u); }, f_);
  }

 private:
  Variant f_ = UpwindAdvection{};
};

/// max |fhat(u, ..., u) - f(u)| over `samples` uniform draws in [lo, hi].
template <ScalarNumericalFlux F>
double consistency_defect(const F& flux, double lo, double hi, int samples, unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::array<double, 16> w{};
  const int width = flux.left() + flux.right() + 1;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double u = dist(rng);
    std::fill(w.begin(), w.begin() + width, u);
    worst = std::max(worst, std::abs(flux(std::span<const double>(w.data(), width)) -
                                     flux.physical(u)));
  }
  return worst;
}

/// Largest one-sided difference quotient of fhat in any argument on [lo, hi].
template <ScalarNumericalFlux F>
double lipschitz_estimate(const F& flux, double lo, double hi, int samples, double h = 1e-6,
                          unsigned seed = 11) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::array<double, 16> w{};
  const int width = flux.left() + flux.right() + 1;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < width; ++k) w[k] = dist(rng);
    std::span<const double> ws(w.data(), width);
    const double f0 = flux(ws);
    for (int k = 0; k < width; ++k) {
      const double keep = w[k];
      w[k] = keep + h;
      worst = std::max(worst, std::abs(flux(ws) - f0) / h);
      w[k] = keep;
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// 2D compressible Euler equations, conserved variables (rho, rho u, rho v, rho E).

using EulerState = std::array<double, 4>;

struct EulerGas {
  double gamma = 1.4;

  /// p = (gamma - 1) rho (E - (u^2 + v^2)/2). Throws on vacuum or negative pressure.
  double pressure(const EulerState& w) const {
    const double rho = w[0];
    if (!(rho > 0.0)) throw std::domain_error("Euler state has nonpositive density");
    const double ke = 0.5 * (w[1] * w[1] + w[2] * w[2]) / rho;
    const double p = (gamma - 1.0) * (w[3] - ke);
    if (!(p > 0.0)) throw std::domain_error("Euler state has nonpositive pressure");
    return p;
  }

  EulerState from_primitive(double rho, double u, double v, double p) const {
    const double E = p / ((gamma - 1.0) * rho) + 0.5 * (u * u + v * v);
    return {rho, rho * u, rho * v, rho * E};
  }

  /// Build a conserved state from (rho, u, v, E) with E the total energy per unit mass.
  static EulerState from_specific_energy(double rho, double u, double v, double E) {
    return {rho, rho * u, rho * v, rho * E};
  }

  /// Physical flux in direction 0 (x) or 1 (y).
  EulerState flux(const EulerState& w, int direction) const {
    const double p = pressure(w);
    const double rho = w[0];
    const double u = w[1] / rho;
    const double v = w[2] / rho;
    if (direction == 0) return {w[1], w[1] * u + p, w[1] * v, (w[3] + p) * u};
    if (direction == 1) return {w[2], w[2] * u, w[2] * v + p, (w[3] + p) * v};
    throw std::invalid_argument("Euler flux direction must be 0 or 1");
  }
};

/// Fourth-order centered interface flux from the physical fluxes of the four
/// cells i-1, i, i+1, i+2.
inline EulerState centered4(const EulerState& fm1, const EulerState& f0, const EulerState& fp1,
                            const EulerState& fp2) {
  EulerState out;
  for (int k = 0; k < 4; ++k)
    out[k] = (-fm1[k] + 7.0 * f0[k] + 7.0 * fp1[k] - fp2[k]) / 12.0;
  return out;
}

inline EulerState centered4_euler(const EulerState& wm1, const EulerState& w0,
                                  const EulerState& wp1, const EulerState& wp2, int direction,
                                  const EulerGas& gas = {}) {
  return centered4(gas.flux(wm1, direction), gas.flux(w0, direction), gas.flux(wp1, direction),
                   gas.flux(wp2, direction));
}

}  // namespace conserva
