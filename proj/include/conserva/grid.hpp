#pragma once

// Uniform periodic meshes, cell-average state storage and the discrete mass
// functional sum_i |Omega_i| u_i.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace conserva {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Periodic uniform grid on (a, b] with m cells. Cell i is (x_i, x_{i+1}].
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double a, double b, Index m) : a_(a), b_(b), m_(m) {
    if (m <= 0) throw std::invalid_argument("Grid1D: cell count must be positive");
    if (!(b > a)) throw std::invalid_argument("Grid1D: require b > a");
    volumes_.assign(static_cast<std::size_t>(m), dx());
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }
  Index cells() const { return m_; }
  double dx() const { return (b_ - a_) / static_cast<double>(m_); }

  /// Left end x_i of cell i. Initial data and exact solutions are sampled here.
  double node(Index i) const { return a_ + static_cast<double>(i) * dx(); }
  double center(Index i) const { return a_ + (static_cast<double>(i) + 0.5) * dx(); }
  double volume(Index i) const { return volumes_[static_cast<std::size_t>(wrap(i))]; }
  std::span<const double> volumes() const { return volumes_; }

  Index wrap(Index i) const {
    const Index r = i % m_;
    return r < 0 ? r + m_ : r;
  }

  /// Grid with every pair of neighbouring cells agglomerated.
  Grid1D coarsened() const {
    if (m_ % 2 != 0) throw std::invalid_argument("Grid1D: agglomeration needs an even cell count");
    return {a_, b_, m_ / 2};
  }

  friend bool operator==(const Grid1D& l, const Grid1D& r) {
    return l.a_ == r.a_ && l.b_ == r.b_ && l.m_ == r.m_;
  }

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  Index m_ = 1;
  std::vector<double> volumes_{1.0};
};

/// Doubly periodic uniform grid on (ax, bx] x (ay, by]. Cell (i, j) has flat index i*my + j.
class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(double ax, double bx, Index mx, double ay, double by, Index my)
      : x_(ax, bx, mx), y_(ay, by, my) {
    volumes_.assign(static_cast<std::size_t>(mx * my), x_.dx() * y_.dx());
  }

  const Grid1D& x() const { return x_; }
  const Grid1D& y() const { return y_; }
  Index mx() const { return x_.cells(); }
  Index my() const { return y_.cells(); }
  Index cells() const { return mx() * my(); }
  double dx() const { return x_.dx(); }
  double dy() const { return y_.dx(); }

  Index flat(Index i, Index j) const { return x_.wrap(i) * my() + y_.wrap(j); }
  double volume(Index c) const { return volumes_[static_cast<std::size_t>(c)]; }
  std::span<const double> volumes() const { return volumes_; }

  friend bool operator==(const Grid2D& l, const Grid2D& r) { return l.x_ == r.x_ && l.y_ == r.y_; }

 private:
  Grid1D x_;
  Grid1D y_;
  std::vector<double> volumes_;
};

/// sum_i w_i v_{i*q + comp}
inline double weighted_sum(std::span<const double> volumes, const Vector& values, int q = 1,
                           int comp = 0) {
  double s = 0.0;
  for (std::size_t i = 0; i < volumes.size(); ++i)
    s += volumes[i] * values[static_cast<Index>(i) * q + comp];
  return s;
}

/// Volume-weighted discrete L2 norm sqrt(sum_i |Omega_i| sum_k v_{i,k}^2).
inline double weighted_norm(std::span<const double> volumes, const Vector& values, int q = 1) {
  double s = 0.0;
  for (std::size_t i = 0; i < volumes.size(); ++i)
    for (int k = 0; k < q; ++k) {
      const double v = values[static_cast<Index>(i) * q + k];
      s += volumes[i] * v * v;
    }
  return std::sqrt(s);
}

/// Cell averages on a 1D or 2D grid, q components per cell stored cell-major.
class StateField {
 public:
  using GridVariant = std::variant<Grid1D, Grid2D>;

  StateField(Grid1D grid, int q = 1) : grid_(std::move(grid)), q_(q) { init(); }
  StateField(Grid2D grid, int q = 1) : grid_(std::move(grid)), q_(q) { init(); }
  StateField(Grid1D grid, Vector values, int q = 1)
      : grid_(std::move(grid)), q_(q), values_(std::move(values)) {
    check_size();
  }
  StateField(Grid2D grid, Vector values, int q = 1)
      : grid_(std::move(grid)), q_(q), values_(std::move(values)) {
    check_size();
  }

  const GridVariant& grid() const { return grid_; }
  bool is_1d() const { return std::holds_alternative<Grid1D>(grid_); }
  const Grid1D& grid1d() const { return std::get<Grid1D>(grid_); }
  const Grid2D& grid2d() const { return std::get<Grid2D>(grid_); }

  int components() const { return q_; }
  Index cells() const {
    return std::visit([](const auto& g) { return g.cells(); }, grid_);
  }
  std::span<const double> volumes() const {
    return std::visit([](const auto& g) { return g.volumes(); }, grid_);
  }

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }

  double& operator()(Index cell, int comp = 0) { return values_[cell * q_ + comp]; }
  double operator()(Index cell, int comp = 0) const { return values_[cell * q_ + comp]; }

  /// Periodic read: at(i + m) == at(i).
  double at(Index cell, int comp = 0) const {
    const Index m = cells();
    Index r = cell % m;
    if (r < 0) r += m;
    return values_[r * q_ + comp];
  }

  bool all_finite() const { return values_.allFinite(); }

  bool same_layout(const StateField& o) const { return q_ == o.q_ && grid_ == o.grid_; }

 private:
  void init() {
    if (q_ <= 0) throw std::invalid_argument("StateField: component count must be positive");
    values_ = Vector::Zero(cells() * q_);
  }
  void check_size() const {
    if (q_ <= 0) throw std::invalid_argument("StateField: component count must be positive");
    if (values_.size() != cells() * q_)
      throw std::invalid_argument("StateField: value count " + std::to_string(values_.size()) +
                                  " does not match cells*q = " + std::to_string(cells() * q_));
  }

  GridVariant grid_;
  int q_ = 1;
  Vector values_;
};

/// sum_i |Omega_i| u_{i,component}
inline double total_mass(const StateField& u, int component = 0) {
  if (component < 0 || component >= u.components())
    throw std::out_of_range("total_mass: component " + std::to_string(component) +
                            " out of range");
  return weighted_sum(u.volumes(), u.values(), u.components(), component);
}

/// total_mass(u) - total_mass(reference) for one component.
inline double mass_error(const StateField& u, const StateField& reference, int component = 0) {
  if (!u.same_layout(reference)) throw std::invalid_argument("mass_error: grid mismatch");
  return total_mass(u, component) - total_mass(reference, component);
}

/// Sample a scalar function at the grid nodes.
template <class F>
StateField sample(const Grid1D& grid, F&& f) {
  StateField u(grid, 1);
  for (Index i = 0; i < grid.cells(); ++i) u(i) = f(grid.node(i));
  return u;
}

}  // namespace conserva
