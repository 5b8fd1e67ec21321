#pragma once

// Iterative solvers for (I - alpha A) x = b where the columns of A have zero
// volume-weighted sum, i.e. A y carries no mass. Every solver records the
// residual norm and mass error of each iterate.

#include "conserva/grid.hpp"
#include "conserva/trace.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace conserva {

class LinearSystem {
 public:
  LinearSystem(Matrix A, double alpha, Vector b, std::vector<double> volumes)
      : A_(std::move(A)), alpha_(alpha), b_(std::move(b)), volumes_(std::move(volumes)) {
    const Index m = A_.rows();
    if (A_.cols() != m || b_.size() != m || static_cast<Index>(volumes_.size()) != m)
      throw std::invalid_argument("LinearSystem: dimension mismatch");
    M_ = Matrix::Identity(m, m) - alpha_ * A_;
  }

  /// Build directly from the system matrix M = I - alpha A (alpha = 1, A = I - M).
  static LinearSystem from_matrix(const Matrix& M, Vector b, std::vector<double> volumes) {
    const Index m = M.rows();
    return {Matrix::Identity(m, m) - M, 1.0, std::move(b), std::move(volumes)};
  }

  Index size() const { return A_.rows(); }
  const Matrix& A() const { return A_; }
  double alpha() const { return alpha_; }
  const Vector& b() const { return b_; }
  /// I - alpha A
  const Matrix& matrix() const { return M_; }
  std::span<const double> volumes() const { return volumes_; }

  Vector linear_residual(const Vector& x) const { return b_ - M_ * x; }
  double residual_norm(const Vector& x) const { return norm(linear_residual(x)); }
  double norm(const Vector& v) const { return weighted_norm(volumes_, v); }
  double mass(const Vector& v) const { return weighted_sum(volumes_, v); }
  double mass_error(const Vector& x) const { return mass(x) - mass(b_); }

  // Pseudo-time form du/dtau + (I - alpha A) u = b.
  void residual(const Vector& x, Vector& g) const { g.noalias() = M_ * x - b_; }
  double time_step() const { return 1.0; }

 private:
  Matrix A_;
  double alpha_;
  Vector b_;
  std::vector<double> volumes_;
  Matrix M_;
};

struct SolveResult {
  Vector x;
  IterationTrace trace;
};

namespace detail {
inline void record(const LinearSystem& sys, IterationTrace& t, int k, const Vector& x,
                   double predicted = std::numeric_limits<double>::quiet_NaN()) {
  t.record(k, sys.residual_norm(x), sys.mass_error(x), predicted);
}

inline void require_nonzero_diagonal(const Matrix& M, const char* who) {
  for (Index i = 0; i < M.rows(); ++i)
    if (M(i, i) == 0.0)
      throw std::domain_error(std::string(who) + ": zero diagonal entry in row " +
                              std::to_string(i));
}
}  // namespace detail

/// x <- x + theta (b - (I - alpha A) x)
inline SolveResult richardson(const LinearSystem& sys, double theta, const Vector& x0, int k) {
  SolveResult r{x0, {}};
  detail::record(sys, r.trace, 0, r.x);
  for (int it = 1; it <= k; ++it) {
    r.x += theta * sys.linear_residual(r.x);
    detail::record(sys, r.trace, it, r.x);
  }
  return r;
}

/// Jacobi sweeps. The trace carries the conservation error
/// alpha sum_i |Omega_i| a_ii (x_i^{k+1} - x_i^k) predicted for each sweep.
inline SolveResult jacobi(const LinearSystem& sys, const Vector& x0, int k) {
  const Matrix& M = sys.matrix();
  detail::require_nonzero_diagonal(M, "jacobi");
  const Index m = sys.size();
  const auto vol = sys.volumes();
  SolveResult r{x0, {}};
  detail::record(sys, r.trace, 0, r.x);
  Vector next(m);
  for (int it = 1; it <= k; ++it) {
    for (Index i = 0; i < m; ++i) {
      const double off = M.row(i).dot(r.x) - M(i, i) * r.x[i];
      next[i] = (sys.b()[i] - off) / M(i, i);
    }
    double predicted = 0.0;
    for (Index i = 0; i < m; ++i)
      predicted += vol[static_cast<std::size_t>(i)] * sys.A()(i, i) * (next[i] - r.x[i]);
    predicted *= sys.alpha();
    r.x.swap(next);
    detail::record(sys, r.trace, it, r.x, predicted);
  }
  return r;
}

/// Forward Gauss-Seidel sweeps. Predicted conservation error per sweep:
/// -alpha sum_i |Omega_i| sum_{j>i} a_ij (x_j^{k+1} - x_j^k).
inline SolveResult gauss_seidel(const LinearSystem& sys, const Vector& x0, int k) {
  const Matrix& M = sys.matrix();
  const Matrix& A = sys.A();
  detail::require_nonzero_diagonal(M, "gauss_seidel");
  const Index m = sys.size();
  const auto vol = sys.volumes();
  SolveResult r{x0, {}};
  detail::record(sys, r.trace, 0, r.x);
  for (int it = 1; it <= k; ++it) {
    const Vector prev = r.x;
    for (Index i = 0; i < m; ++i) {
      const double off = M.row(i).dot(r.x) - M(i, i) * r.x[i];
      r.x[i] = (sys.b()[i] - off) / M(i, i);
    }
    const Vector delta = r.x - prev;
    double predicted = 0.0;
    for (Index i = 0; i < m; ++i) {
      double upper = 0.0;
      for (Index j = i + 1; j < m; ++j) upper += A(i, j) * delta[j];
      predicted += vol[static_cast<std::size_t>(i)] * upper;
    }
    predicted *= -sys.alpha();
    detail::record(sys, r.trace, it, r.x, predicted);
  }
  return r;
}

/// Unrestarted, unpreconditioned GMRES (Arnoldi with modified Gram-Schmidt and
/// Givens rotations). Stops early on happy breakdown.
inline SolveResult gmres(const LinearSystem& sys, const Vector& x0, int k) {
  const Index m = sys.size();
  if (k < 0 || k > m) throw std::invalid_argument("gmres: iteration count must be in [0, m]");
  const Matrix& M = sys.matrix();
  SolveResult r{x0, {}};
  detail::record(sys, r.trace, 0, r.x);
  const Vector r0 = sys.linear_residual(x0);
  const double beta = r0.norm();
  if (k == 0 || beta == 0.0) return r;

  Matrix V = Matrix::Zero(m, k + 1);
  Matrix H = Matrix::Zero(k + 1, k);
  Vector cs = Vector::Zero(k), sn = Vector::Zero(k);
  Vector g = Vector::Zero(k + 1);
  g[0] = beta;
  V.col(0) = r0 / beta;

  for (int j = 0; j < k; ++j) {
    Vector w = M * V.col(j);
    for (int i = 0; i <= j; ++i) {
      H(i, j) = w.dot(V.col(i));
      w -= H(i, j) * V.col(i);
    }
    H(j + 1, j) = w.norm();
    const bool breakdown = H(j + 1, j) <= 1e-14 * beta;
    if (!breakdown) V.col(j + 1) = w / H(j + 1, j);

    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
      H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
      H(i, j) = t;
    }
    const double den = std::hypot(H(j, j), H(j + 1, j));
    cs[j] = H(j, j) / den;
    sn[j] = H(j + 1, j) / den;
    H(j, j) = den;
    H(j + 1, j) = 0.0;
    g[j + 1] = -sn[j] * g[j];
    g[j] = cs[j] * g[j];

    const int n = j + 1;
    const Vector y = H.topLeftCorner(n, n).triangularView<Eigen::Upper>().solve(g.head(n));
    r.x = x0 + V.leftCols(n) * y;
    detail::record(sys, r.trace, n, r.x);
    if (breakdown) break;
  }
  return r;
}

/// Agglomeration restriction: coarse cell I is the volume-weighted average of fine cells 2I, 2I+1.
inline Matrix agglomeration_restriction(Index m) {
  if (m % 2 != 0) throw std::invalid_argument("agglomeration needs an even cell count");
  Matrix R = Matrix::Zero(m / 2, m);
  for (Index I = 0; I < m / 2; ++I) R(I, 2 * I) = R(I, 2 * I + 1) = 0.5;
  return R;
}

/// Injection prolongation P = 2 R^T.
inline Matrix agglomeration_prolongation(Index m) {
  return 2.0 * agglomeration_restriction(m).transpose();
}

using CoarseSolver = Eigen::PartialPivLU<Matrix>;

inline CoarseSolver factor_coarse(const Matrix& coarse) {
  CoarseSolver lu(coarse);
  if (!(lu.rcond() > 1e-13)) throw std::runtime_error("cgc: singular coarse-grid matrix");
  return lu;
}

/// One two-level coarse grid correction with an exact coarse solve:
/// x <- x + P (I - alpha A)_c^{-1} R (b - (I - alpha A) x).
inline SolveResult cgc(const LinearSystem& sys, const CoarseSolver& coarse, const Vector& x0,
                       const Matrix& restriction, const Matrix& prolongation) {
  const Index m = sys.size();
  if (m % 2 != 0) throw std::invalid_argument("cgc: fine grid must have an even cell count");
  if (restriction.cols() != m || prolongation.rows() != m ||
      restriction.rows() != prolongation.cols() || coarse.rows() != restriction.rows())
    throw std::invalid_argument("cgc: transfer operator dimensions do not match");
  SolveResult r{x0, {}};
  detail::record(sys, r.trace, 0, r.x);
  const Vector rc = restriction * sys.linear_residual(x0);
  r.x += prolongation * coarse.solve(rc);
  detail::record(sys, r.trace, 1, r.x);
  return r;
}

inline SolveResult cgc(const LinearSystem& sys, const Matrix& coarse_matrix, const Vector& x0,
                       const Matrix& restriction, const Matrix& prolongation) {
  return cgc(sys, factor_coarse(coarse_matrix), x0, restriction, prolongation);
}

/// Direct LU solve of (I - alpha A) x = b.
inline Vector direct_solve(const Matrix& M, const Vector& b) {
  Eigen::PartialPivLU<Matrix> lu(M);
  if (!(lu.rcond() > 1e-14)) throw std::runtime_error("direct_solve: singular matrix");
  return lu.solve(b);
}

inline SolveResult direct_solve(const LinearSystem& sys) {
  SolveResult r{direct_solve(sys.matrix(), sys.b()), {}};
  detail::record(sys, r.trace, 1, r.x);
  return r;
}

}  // namespace conserva
