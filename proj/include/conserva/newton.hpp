#pragma once

// Newton's method for the implicit Euler system u - alpha fhat(u) = u^n:
//
//     (I - alpha fhat'(u_k)) du = u^n - u_k + alpha fhat(u_k),   u_{k+1} = u_k + du.

#include "conserva/linear_solvers.hpp"
#include "conserva/pseudo_time.hpp"
#include "conserva/semidisc.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace conserva {

enum class InnerSolver { exact, richardson, jacobi, gauss_seidel, gmres, cgc, heun };

inline std::string_view to_string(InnerSolver s) {
  switch (s) {
    case InnerSolver::exact: return "exact";
    case InnerSolver::richardson: return "richardson";
    case InnerSolver::jacobi: return "jacobi";
    case InnerSolver::gauss_seidel: return "gauss_seidel";
    case InnerSolver::gmres: return "gmres";
    case InnerSolver::cgc: return "cgc";
    case InnerSolver::heun: return "heun";
  }
  return "?";
}

inline InnerSolver inner_solver_from_name(std::string_view name) {
  for (auto s : {InnerSolver::exact, InnerSolver::richardson, InnerSolver::jacobi,
                 InnerSolver::gauss_seidel, InnerSolver::gmres, InnerSolver::cgc,
                 InnerSolver::heun})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown inner solver '" + std::string(name) + "'");
}

/// Initial guess for each Newton increment: 0, or u^n - u_k (the increment back to the old state).
enum class InitialGuess { zero, previous_state };

struct NewtonConfig {
  int outer = 1;
  InnerSolver inner = InnerSolver::exact;
  int inner_iterations = 1;
  double theta = 0.5;    // Richardson relaxation
  double heun_mu = 0.5;  // pseudo-time step of the Heun inner solver
  InitialGuess guess = InitialGuess::zero;

  void validate() const {
    if (outer < 1) throw std::invalid_argument("newton: outer iteration count must be >= 1");
    if (inner_iterations < 1)
      throw std::invalid_argument("newton: inner iteration count must be >= 1");
  }
};

/// Solve M x = b with the configured inner method.
inline SolveResult solve_inner(const LinearSystem& lin, const NewtonConfig& cfg, const Vector& x0,
                               const Matrix* coarse = nullptr) {
  const int k = cfg.inner_iterations;
  switch (cfg.inner) {
    case InnerSolver::exact: return direct_solve(lin);
    case InnerSolver::richardson: return richardson(lin, cfg.theta, x0, k);
    case InnerSolver::jacobi: return jacobi(lin, x0, k);
    case InnerSolver::gauss_seidel: return gauss_seidel(lin, x0, k);
    case InnerSolver::gmres: return gmres(lin, x0, k);
    case InnerSolver::cgc: {
      if (!coarse) throw std::invalid_argument("cgc inner solver needs a coarse operator");
      const Matrix R = agglomeration_restriction(lin.size());
      const Matrix P = agglomeration_prolongation(lin.size());
      const CoarseSolver lu = factor_coarse(*coarse);
      SolveResult r{x0, {}};
      for (int it = 0; it < k; ++it) r = cgc(lin, lu, r.x, R, P);
      return r;
    }
    case InnerSolver::heun: {
      auto p = pseudo_solve(lin, ButcherTableau::heun(), PseudoSchedule::constant(cfg.heun_mu, k),
                            x0);
      SolveResult r{std::move(p.u), {}};
      r.trace.record(k, lin.residual_norm(r.x), lin.mass_error(r.x));
      return r;
    }
  }
  throw std::logic_error("unhandled inner solver");
}

struct NewtonResult {
  Vector u;
  /// Residual column: weighted norm of u^n - u_k + alpha fhat(u_k).
  IterationTrace trace;
  std::vector<IterationTrace> inner;
};

template <ScalarNumericalFlux Flux>
NewtonResult newton_solve(const ImplicitEulerSystem<Flux>& sys, const Vector& u0,
                          const NewtonConfig& cfg) {
  cfg.validate();
  NewtonResult r{u0, {}, {}};
  sys.constrain(r.u);
  r.trace.record(0, sys.norm(sys.implicit_residual(r.u)), sys.mass_error(r.u));
  const std::vector<double> vol(sys.grid().volumes().begin(), sys.grid().volumes().end());
  for (int k = 1; k <= cfg.outer; ++k) {
    Vector rhs = sys.newton_rhs(r.u);
    if (sys.inflow()) rhs[0] = 0.0;
    Matrix A = sys.fhat_jacobian(r.u);
    if (sys.inflow()) A.row(0).setZero();
    LinearSystem lin(std::move(A), sys.alpha(), std::move(rhs), vol);
    Vector x0 = Vector::Zero(sys.grid().cells());
    if (cfg.guess == InitialGuess::previous_state) x0 = sys.previous() - r.u;
    Matrix coarse;
    if (cfg.inner == InnerSolver::cgc)
      coarse = sys.coarse_jacobian(agglomeration_restriction(sys.grid().cells()) * r.u);
    SolveResult inner = solve_inner(lin, cfg, x0, cfg.inner == InnerSolver::cgc ? &coarse : nullptr);
    r.u += inner.x;
    sys.constrain(r.u);
    r.inner.push_back(std::move(inner.trace));
    r.trace.record(k, sys.norm(sys.implicit_residual(r.u)), sys.mass_error(r.u));
  }
  return r;
}

}  // namespace conserva
