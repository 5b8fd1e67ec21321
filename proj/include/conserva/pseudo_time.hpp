#pragma once

// Explicit Runge-Kutta pseudo-time iterations for g(u) = 0:
//
//     U_j = u - dtau sum_{l<j} a_jl g(U_l),   u <- u - dtau sum_j b_j g(U_j),
//
// with dtau_k = mu_k dt. Truncating after N iterations changes the effective
// flux by the factor c = 1 - prod_l phi(-mu_l).

#include "conserva/grid.hpp"
#include "conserva/tableau.hpp"
#include "conserva/trace.hpp"

#include <cmath>
#include <concepts>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace conserva {

class PseudoSchedule {
 public:
  PseudoSchedule() = default;
  PseudoSchedule(std::vector<double> mu) : mu_(std::move(mu)) { validate(); }
  PseudoSchedule(std::initializer_list<double> mu) : mu_(mu) { validate(); }

  static PseudoSchedule constant(double mu, int n) {
    if (n < 0) throw std::invalid_argument("schedule: negative iteration count");
    return PseudoSchedule(std::vector<double>(static_cast<std::size_t>(n), mu));
  }

  /// mu_l = 2^{-l}, l = 0..n-1
  static PseudoSchedule halving(int n) {
    std::vector<double> mu;
    for (int l = 0; l < n; ++l) mu.push_back(std::ldexp(1.0, -l));
    return mu;
  }

  std::size_t size() const { return mu_.size(); }
  bool empty() const { return mu_.empty(); }
  double operator[](std::size_t k) const { return mu_[k]; }
  const std::vector<double>& values() const { return mu_; }
  auto begin() const { return mu_.begin(); }
  auto end() const { return mu_.end(); }

  /// Total pseudo-time travelled in units of dt.
  double sum() const { return std::accumulate(mu_.begin(), mu_.end(), 0.0); }

  void push_back(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw std::invalid_argument("schedule: step ratios must be positive");
    mu_.push_back(mu);
  }

 private:
  void validate() const {
    for (double m : mu_)
      if (!(m > 0.0) || !std::isfinite(m))
        throw std::invalid_argument("schedule: step ratios must be positive");
  }

  std::vector<double> mu_;
};

/// c = 1 - prod_l phi(-mu_l)
inline double modification_constant(const ButcherTableau& tab, const PseudoSchedule& schedule) {
  double prod = 1.0;
  for (double mu : schedule) prod *= tab.stability(-mu);
  return 1.0 - prod;
}

class NoRealRootError : public std::domain_error {
 public:
  explicit NoRealRootError(const std::string& tableau)
      : std::domain_error("tableau '" + tableau + "': stability polynomial phi(-mu) has no real root in (0, 3]") {}
};

/// Smallest mu in (0, 3] with phi(-mu) = 0. Exact for a single-stage Euler tableau.
inline double stability_root(const ButcherTableau& tab) {
  if (tab.stages() == 1 && tab.A()(0, 0) == 0.0) return 1.0 / tab.b()[0];
  auto f = [&](double mu) { return tab.stability(-mu); };
  constexpr int scan = 600;
  double lo = 0.0;
  double flo = f(lo);
  for (int k = 1; k <= scan; ++k) {
    const double hi = 3.0 * k / scan;
    const double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) != (fhi > 0.0)) {
      double a = lo, b = hi;
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        if ((f(mid) > 0.0) == (flo > 0.0)) a = mid;
        else b = mid;
      }
      return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
    }
    lo = hi;
    flo = fhi;
  }
  throw NoRealRootError(tab.name());
}

/// [mu_root, base_mu x n_tail]: the first iteration annihilates the initial error mode so c = 1.
inline PseudoSchedule root_first_schedule(const ButcherTableau& tab, double base_mu, int n_tail) {
  if (n_tail < 0) throw std::invalid_argument("root_first_schedule: negative tail length");
  std::vector<double> mu{stability_root(tab)};
  mu.insert(mu.end(), static_cast<std::size_t>(n_tail), base_mu);
  return mu;
}

// ---------------------------------------------------------------------------

template <class P>
concept PseudoTimeProblem = requires(const P& p, const Vector& u, Vector& g) {
  p.residual(u, g);
  { p.time_step() } -> std::convertible_to<double>;
  { p.norm(u) } -> std::convertible_to<double>;
  { p.mass_error(u) } -> std::convertible_to<double>;
};

template <class P>
concept FluxRecordingProblem = PseudoTimeProblem<P> && requires(const P& p, const Vector& u,
                                                                 Vector& g, Vector* F) {
  p.residual(u, g, F);
};

namespace detail {
template <class P>
void constrain(const P& p, Vector& u) {
  if constexpr (requires { p.constrain(u); }) p.constrain(u);
}

template <class P>
void eval_g(const P& p, const Vector& u, Vector& g, Vector* F) {
  if constexpr (FluxRecordingProblem<P>) {
    p.residual(u, g, F);
  } else {
    p.residual(u, g);
  }
}
}  // namespace detail

/// Interface fluxes F_{i+1/2} of every stage of one pseudo-time iteration.
using StageFluxes = std::vector<Vector>;

/// One ERK pseudo-time iteration. `g0`, if given, must equal g(u) and is reused as stage 1.
template <PseudoTimeProblem P>
Vector erk_pseudo_step(const P& sys, const ButcherTableau& tab, double dtau, const Vector& u,
                       StageFluxes* fluxes = nullptr, const Vector* g0 = nullptr) {
  const int s = tab.stages();
  std::vector<Vector> G(static_cast<std::size_t>(s));
  if (fluxes) fluxes->assign(static_cast<std::size_t>(s), Vector());
  for (int j = 0; j < s; ++j) {
    Vector* F = fluxes ? &(*fluxes)[j] : nullptr;
    if (j == 0 && g0 && !F) {
      G[0] = *g0;
      continue;
    }
    Vector U = u;
    for (int l = 0; l < j; ++l)
      if (tab.A()(j, l) != 0.0) U -= dtau * tab.A()(j, l) * G[l];
    detail::constrain(sys, U);
    detail::eval_g(sys, U, G[j], F);
  }
  Vector next = u;
  for (int j = 0; j < s; ++j)
    if (tab.b()[j] != 0.0) next -= dtau * tab.b()[j] * G[j];
  detail::constrain(sys, next);
  return next;
}

struct PseudoResult {
  Vector u;
  /// Residual column holds ||g(u^k)|| / ||g(u^0)||.
  IterationTrace trace;
  double initial_residual = 0.0;
  /// stage_fluxes[k][j]: interface fluxes of stage j in iteration k (when recorded).
  std::vector<StageFluxes> stage_fluxes;
};

/// N = schedule.size() ERK iterations with dtau_k = mu_k dt starting from u0.
template <PseudoTimeProblem P>
PseudoResult pseudo_solve(const P& sys, const ButcherTableau& tab, const PseudoSchedule& schedule,
                          const Vector& u0, bool record_fluxes = false) {
  if (record_fluxes && !FluxRecordingProblem<P>)
    throw std::invalid_argument("pseudo_solve: problem does not expose interface fluxes");
  PseudoResult r{u0, {}, 0.0, {}};
  detail::constrain(sys, r.u);
  const double dt = sys.time_step();
  Vector g;
  sys.residual(r.u, g);
  r.initial_residual = sys.norm(g);
  const double scale = r.initial_residual > 0.0 ? r.initial_residual : 1.0;
  r.trace.record(0, r.initial_residual / scale, sys.mass_error(r.u));
  int k = 0;
  for (double mu : schedule) {
    StageFluxes* F = nullptr;
    if (record_fluxes) F = &r.stage_fluxes.emplace_back();
    r.u = erk_pseudo_step(sys, tab, mu * dt, r.u, F, &g);
    sys.residual(r.u, g);
    r.trace.record(++k, sys.norm(g) / scale, sys.mass_error(r.u));
  }
  return r;
}

/// Conservative flux of the whole pseudo-time solve:
/// h = sum_k mu_k b^T (I + mu_k A)^{-1} (prod_{l>k} phi(-mu_l)) F^{(k)}.
inline Vector h_flux_oracle(const ButcherTableau& tab, const PseudoSchedule& schedule,
                            const std::vector<StageFluxes>& stage_fluxes) {
  const std::size_t N = schedule.size();
  if (stage_fluxes.size() != N)
    throw std::invalid_argument("h_flux_oracle: one set of stage fluxes per iteration required");
  if (N == 0) return {};
  const Index m = stage_fluxes.front().front().size();
  Vector h = Vector::Zero(m);
  double tail = 1.0;  // prod_{l>k} phi(-mu_l)
  for (std::size_t kk = N; kk-- > 0;) {
    const double mu = schedule[kk];
    const Vector w = tab.stage_weights(mu);
    for (int j = 0; j < tab.stages(); ++j)
      if (w[j] != 0.0) h += (mu * tail * w[j]) * stage_fluxes[kk][j];
    tail *= tab.stability(-mu);
  }
  return h;
}

/// max_i |(u^N_i - u^n_i)/dt + (h_{i+1/2} - h_{i-1/2})/dx| on a periodic 1D grid.
inline double flux_form_defect(const Vector& un, const Vector& uN, const Vector& h, double dt,
                               double dx) {
  const Index m = un.size();
  double worst = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double hl = h[(i + m - 1) % m];
    worst = std::max(worst, std::abs((uN[i] - un[i]) / dt + (h[i] - hl) / dx));
  }
  return worst;
}

}  // namespace conserva
