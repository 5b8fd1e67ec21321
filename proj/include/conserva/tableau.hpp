#pragma once

#include "conserva/grid.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace conserva {

/// Explicit Runge-Kutta coefficients (A strictly lower triangular, sum b = 1).
class ButcherTableau {
 public:
  ButcherTableau(std::string name, Matrix A, Vector b, Vector c)
      : name_(std::move(name)), A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
    validate();
  }

  static ButcherTableau euler() {
    return {"euler", Matrix::Zero(1, 1), Vector::Ones(1), Vector::Zero(1)};
  }

  static ButcherTableau heun() {
    Matrix A(2, 2);
    A << 0, 0, 1, 0;
    Vector b(2), c(2);
    b << 0.5, 0.5;
    c << 0, 1;
    return {"heun", A, b, c};
  }

  static ButcherTableau ssprk3() {
    Matrix A(3, 3);
    A << 0, 0, 0, 1, 0, 0, 0.25, 0.25, 0;
    Vector b(3), c(3);
    b << 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
    c << 0, 1, 0.5;
    return {"ssprk3", A, b, c};
  }

  static std::vector<std::string> builtin_names() { return {"euler", "heun", "ssprk3"}; }

  static ButcherTableau by_name(std::string_view name) {
    if (name == "euler") return euler();
    if (name == "heun") return heun();
    if (name == "ssprk3") return ssprk3();
    throw std::invalid_argument("unknown tableau '" + std::string(name) + "'");
  }

  /// {"name": ..., "s": 2, "A": [[0,0],[1,0]], "b": [0.5,0.5], "c": [0,1]}
  static ButcherTableau from_json(const nlohmann::json& j) {
    const int s = j.at("s").get<int>();
    if (s < 1) throw std::invalid_argument("tableau: s must be positive");
    const auto rows = j.at("A").get<std::vector<std::vector<double>>>();
    const auto b = j.at("b").get<std::vector<double>>();
    const auto c = j.at("c").get<std::vector<double>>();
    if (static_cast<int>(rows.size()) != s || static_cast<int>(b.size()) != s ||
        static_cast<int>(c.size()) != s)
      throw std::invalid_argument("tableau: A, b, c must have s entries");
    Matrix A(s, s);
    for (int i = 0; i < s; ++i) {
      if (static_cast<int>(rows[i].size()) != s)
        throw std::invalid_argument("tableau: A must be s x s");
      for (int k = 0; k < s; ++k) A(i, k) = rows[i][k];
    }
    return {j.value("name", std::string("custom")), A, Eigen::Map<const Vector>(b.data(), s),
            Eigen::Map<const Vector>(c.data(), s)};
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["name"] = name_;
    j["s"] = stages();
    std::vector<std::vector<double>> rows(stages(), std::vector<double>(stages()));
    for (int i = 0; i < stages(); ++i)
      for (int k = 0; k < stages(); ++k) rows[i][k] = A_(i, k);
    j["A"] = rows;
    j["b"] = std::vector<double>(b_.begin(), b_.end());
    j["c"] = std::vector<double>(c_.begin(), c_.end());
    return j;
  }

  const std::string& name() const { return name_; }
  int stages() const { return static_cast<int>(b_.size()); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& c() const { return c_; }

  /// phi(z) = 1 + z b^T (I - zA)^{-1} 1 by forward substitution.
  template <class T>
  T stability(T z) const {
    const int s = stages();
    std::vector<T> y(static_cast<std::size_t>(s));
    T out = T(1);
    for (int i = 0; i < s; ++i) {
      T acc = T(1);
      for (int k = 0; k < i; ++k) acc += z * A_(i, k) * y[k];
      y[i] = acc;
      out += z * b_[i] * acc;
    }
    return out;
  }

  double stability(double z) const { return stability<double>(z); }
  std::complex<double> stability(std::complex<double> z) const {
    return stability<std::complex<double>>(z);
  }

  /// w^T = b^T (I + mu A)^{-1}, i.e. (I + mu A)^T w = b solved by back substitution.
  Vector stage_weights(double mu) const {
    const int s = stages();
    Vector w(s);
    for (int j = s - 1; j >= 0; --j) {
      double acc = b_[j];
      for (int i = j + 1; i < s; ++i) acc -= mu * A_(i, j) * w[i];
      w[j] = acc;
    }
    return w;
  }

 private:
  void validate() const {
    const Index s = b_.size();
    if (s < 1) throw std::invalid_argument("tableau: at least one stage required");
    if (A_.rows() != s || A_.cols() != s || c_.size() != s)
      throw std::invalid_argument("tableau: inconsistent dimensions");
    for (Index i = 0; i < s; ++i)
      for (Index k = i; k < s; ++k)
        if (A_(i, k) != 0.0)
          throw std::invalid_argument("tableau '" + name_ + "' is not explicit");
    if (std::abs(b_.sum() - 1.0) > 1e-12)
      throw std::invalid_argument("tableau '" + name_ + "': weights must sum to 1");
  }

  std::string name_;
  Matrix A_;
  Vector b_;
  Vector c_;
};

}  // namespace conserva
