#pragma once

// Semidiscrete flux-difference operators and the implicit Euler systems built
// on them.
//
// Sign conventions. D(u)_i = (fhat_{i+1/2} - fhat_{i-1/2}) / dx is the flux
// divergence, so the semidiscrete right-hand side is -D(u). One implicit Euler
// step solves
//
//     u - alpha * fhat(u) = u^n,    alpha * fhat(u) = -dt * D(u),
//
// where fhat is either dx * D (alpha = -dt/dx, the linear advection form) or D
// itself (alpha = -dt, the form used for Burgers). The pseudo-time residual is
//
//     g(u) = (u - u^n) / dt + D(u).

#include "conserva/flux.hpp"
#include "conserva/grid.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

namespace conserva {

template <ScalarNumericalFlux Flux = ScalarFlux>
class Semidisc1D {
 public:
  Semidisc1D(Grid1D grid, Flux flux) : grid_(std::move(grid)), flux_(std::move(flux)) {}

  const Grid1D& grid() const { return grid_; }
  const Flux& flux() const { return flux_; }

  /// F[i] = fhat_{i+1/2}, periodic.
  void interface_fluxes(const Vector& u, Vector& F) const {
    const Index m = grid_.cells();
    const int p = flux_.left();
    const int width = p + flux_.right() + 1;
    F.resize(m);
    std::array<double, 16> w{};
    for (Index i = 0; i < m; ++i) {
      for (int k = 0; k < width; ++k) w[k] = u[grid_.wrap(i - p + k)];
      F[i] = flux_(std::span<const double>(w.data(), width));
    }
  }

  Vector interface_fluxes(const Vector& u) const {
    Vector F;
    interface_fluxes(u, F);
    return F;
  }

  void divergence(const Vector& u, Vector& D, Vector* fluxes = nullptr) const {
    Vector local;
    Vector& F = fluxes ? *fluxes : local;
    interface_fluxes(u, F);
    const Index m = grid_.cells();
    const double inv_dx = 1.0 / grid_.dx();
    D.resize(m);
    for (Index i = 0; i < m; ++i) D[i] = (F[i] - F[grid_.wrap(i - 1)]) * inv_dx;
  }

  Vector divergence(const Vector& u) const {
    Vector D;
    divergence(u, D);
    return D;
  }

  /// Semidiscrete right-hand side -D(u).
  Vector rhs(const Vector& u) const { return -divergence(u); }
  StateField rhs(const StateField& u) const {
    if (!(u.is_1d() && u.grid1d() == grid_)) throw std::invalid_argument("rhs: grid mismatch");
    if (!u.all_finite()) throw std::domain_error("rhs: non-finite state");
    return StateField(grid_, rhs(u.values()));
  }

  /// dD/du as a dense matrix.
  Matrix divergence_jacobian(const Vector& u) const {
    const Index m = grid_.cells();
    const int p = flux_.left();
    const int width = p + flux_.right() + 1;
    const double inv_dx = 1.0 / grid_.dx();
    Matrix J = Matrix::Zero(m, m);
    std::array<double, 16> w{};
    std::array<double, 16> dw{};
    for (Index i = 0; i < m; ++i) {
      for (int k = 0; k < width; ++k) w[k] = u[grid_.wrap(i - p + k)];
      flux_.gradient(std::span<const double>(w.data(), width), std::span<double>(dw.data(), width));
      // fhat_{i+1/2} enters D_i with +1/dx and D_{i+1} with -1/dx.
      const Index up = grid_.wrap(i + 1);
      for (int k = 0; k < width; ++k) {
        const Index col = grid_.wrap(i - p + k);
        J(i, col) += dw[k] * inv_dx;
        J(up, col) -= dw[k] * inv_dx;
      }
    }
    return J;
  }

  Semidisc1D coarsened() const { return {grid_.coarsened(), flux_}; }

 private:
  Grid1D grid_;
  Flux flux_;
};

enum class FluxScaling {
  flux_difference,  // fhat = dx * D, alpha = -dt/dx
  divided_by_dx,    // fhat = D, alpha = -dt
};

template <ScalarNumericalFlux Flux = ScalarFlux>
class ImplicitEulerSystem {
 public:
  ImplicitEulerSystem(Semidisc1D<Flux> disc, double dt, Vector previous,
                      FluxScaling scaling = FluxScaling::divided_by_dx)
      : disc_(std::move(disc)), dt_(dt), un_(std::move(previous)), scaling_(scaling) {
    if (!(dt > 0.0)) throw std::invalid_argument("ImplicitEulerSystem: dt must be positive");
    if (un_.size() != disc_.grid().cells())
      throw std::invalid_argument("ImplicitEulerSystem: previous state has wrong size");
  }

  const Semidisc1D<Flux>& semidisc() const { return disc_; }
  const Grid1D& grid() const { return disc_.grid(); }
  double time_step() const { return dt_; }
  const Vector& previous() const { return un_; }
  FluxScaling scaling() const { return scaling_; }

  /// Pin the leftmost cell to a fixed inflow value.
  void set_inflow(std::optional<double> value) { inflow_ = value; }
  const std::optional<double>& inflow() const { return inflow_; }

  double operator_scale() const {
    return scaling_ == FluxScaling::flux_difference ? grid().dx() : 1.0;
  }
  double alpha() const { return -dt_ / operator_scale(); }

  Vector fhat(const Vector& u) const { return operator_scale() * disc_.divergence(u); }
  Matrix fhat_jacobian(const Vector& u) const {
    return operator_scale() * disc_.divergence_jacobian(u);
  }

  /// g(u) = (u - u^n)/dt + D(u); optionally returns the interface fluxes used.
  void residual(const Vector& u, Vector& g, Vector* fluxes = nullptr) const {
    disc_.divergence(u, g, fluxes);
    g += (u - un_) / dt_;
    if (inflow_) g[0] = 0.0;
  }

  Vector g_eval(const Vector& u) const {
    Vector g;
    residual(u, g);
    return g;
  }
  StateField g_eval(const StateField& u) const {
    if (!(u.is_1d() && u.grid1d() == grid())) throw std::invalid_argument("g_eval: grid mismatch");
    return StateField(grid(), g_eval(u.values()));
  }

  /// u^n - u + alpha fhat(u), i.e. -dt * g(u).
  Vector implicit_residual(const Vector& u) const {
    Vector r = un_ - u + alpha() * fhat(u);
    if (inflow_) r[0] = 0.0;
    return r;
  }

  /// I - alpha fhat'(u)
  Matrix jacobian(const Vector& u) const {
    const Index m = grid().cells();
    return Matrix::Identity(m, m) - alpha() * fhat_jacobian(u);
  }
  Matrix newton_matrix(const Vector& u) const { return jacobian(u); }
  Vector newton_rhs(const Vector& u) const { return implicit_residual(u); }

  /// Newton matrix rediscretized on the agglomerated grid at the restricted state.
  Matrix coarse_jacobian(const Vector& u_coarse) const {
    const Semidisc1D<Flux> coarse = disc_.coarsened();
    const Index mc = coarse.grid().cells();
    const double scale = scaling_ == FluxScaling::flux_difference ? coarse.grid().dx() : 1.0;
    const double alpha_c = -dt_ / scale;
    return Matrix::Identity(mc, mc) - alpha_c * scale * coarse.divergence_jacobian(u_coarse);
  }

  double mass(const Vector& u) const { return weighted_sum(grid().volumes(), u); }
  double mass_error(const Vector& u) const { return mass(u) - mass(un_); }
  double norm(const Vector& v) const { return weighted_norm(grid().volumes(), v); }

  void constrain(Vector& u) const {
    if (inflow_) u[0] = *inflow_;
  }

  ImplicitEulerSystem with_previous(Vector previous) const {
    ImplicitEulerSystem s(disc_, dt_, std::move(previous), scaling_);
    s.inflow_ = inflow_;
    return s;
  }

 private:
  Semidisc1D<Flux> disc_;
  double dt_;
  Vector un_;
  FluxScaling scaling_;
  std::optional<double> inflow_;
};

// ---------------------------------------------------------------------------
// 2D Euler with the fourth-order centered flux in each direction.

class EulerSemidisc2D {
 public:
  static constexpr int q = 4;

  EulerSemidisc2D(Grid2D grid, EulerGas gas = {}) : grid_(std::move(grid)), gas_(gas) {}

  const Grid2D& grid() const { return grid_; }
  const EulerGas& gas() const { return gas_; }

  static EulerState state(const Vector& u, Index cell) {
    return {u[cell * q], u[cell * q + 1], u[cell * q + 2], u[cell * q + 3]};
  }

  void divergence(const Vector& u, Vector& D) const {
    const Index mx = grid_.mx();
    const Index my = grid_.my();
    const Index n = grid_.cells();
    fx_.resize(static_cast<std::size_t>(n));
    fy_.resize(static_cast<std::size_t>(n));
    for (Index c = 0; c < n; ++c) {
      const EulerState w = state(u, c);
      fx_[c] = gas_.flux(w, 0);
      fy_[c] = gas_.flux(w, 1);
    }
    hx_.resize(static_cast<std::size_t>(n));
    hy_.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < mx; ++i)
      for (Index j = 0; j < my; ++j) {
        const Index c = grid_.flat(i, j);
        hx_[c] = centered4(fx_[grid_.flat(i - 1, j)], fx_[c], fx_[grid_.flat(i + 1, j)],
                           fx_[grid_.flat(i + 2, j)]);
        hy_[c] = centered4(fy_[grid_.flat(i, j - 1)], fy_[c], fy_[grid_.flat(i, j + 1)],
                           fy_[grid_.flat(i, j + 2)]);
      }
    const double inv_dx = 1.0 / grid_.dx();
    const double inv_dy = 1.0 / grid_.dy();
    D.resize(n * q);
    for (Index i = 0; i < mx; ++i)
      for (Index j = 0; j < my; ++j) {
        const Index c = grid_.flat(i, j);
        const EulerState& xl = hx_[grid_.flat(i - 1, j)];
        const EulerState& yl = hy_[grid_.flat(i, j - 1)];
        for (int k = 0; k < q; ++k)
          D[c * q + k] = (hx_[c][k] - xl[k]) * inv_dx + (hy_[c][k] - yl[k]) * inv_dy;
      }
  }

  Vector divergence(const Vector& u) const {
    Vector D;
    divergence(u, D);
    return D;
  }
  Vector rhs(const Vector& u) const { return -divergence(u); }

 private:
  Grid2D grid_;
  EulerGas gas_;
  mutable std::vector<EulerState> fx_, fy_, hx_, hy_;
};

class EulerImplicitSystem {
 public:
  EulerImplicitSystem(EulerSemidisc2D disc, double dt, Vector previous)
      : disc_(std::move(disc)), dt_(dt), un_(std::move(previous)) {
    if (!(dt > 0.0)) throw std::invalid_argument("EulerImplicitSystem: dt must be positive");
    if (un_.size() != disc_.grid().cells() * EulerSemidisc2D::q)
      throw std::invalid_argument("EulerImplicitSystem: previous state has wrong size");
  }

  const EulerSemidisc2D& semidisc() const { return disc_; }
  double time_step() const { return dt_; }
  const Vector& previous() const { return un_; }

  void residual(const Vector& u, Vector& g) const {
    disc_.divergence(u, g);
    g += (u - un_) / dt_;
  }
  Vector g_eval(const Vector& u) const {
    Vector g;
    residual(u, g);
    return g;
  }

  /// Density mass error.
  double mass_error(const Vector& u) const {
    const auto vol = disc_.grid().volumes();
    return weighted_sum(vol, u, EulerSemidisc2D::q, 0) -
           weighted_sum(vol, un_, EulerSemidisc2D::q, 0);
  }
  double norm(const Vector& v) const {
    return weighted_norm(disc_.grid().volumes(), v, EulerSemidisc2D::q);
  }

  EulerImplicitSystem with_previous(Vector previous) const {
    return {disc_, dt_, std::move(previous)};
  }

 private:
  EulerSemidisc2D disc_;
  double dt_;
  Vector un_;
};

}  // namespace conserva
