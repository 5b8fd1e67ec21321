#pragma once

#include "conserva/csv.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace conserva {

struct TraceEntry {
  int iteration = 0;
  double residual = 0.0;
  double mass_error = 0.0;
  /// Closed-form conservation error where the method has one (Jacobi, Gauss-Seidel), else NaN.
  double predicted_error = std::numeric_limits<double>::quiet_NaN();
};

/// Per-iterate diagnostics. Entry 0 describes the initial guess.
class IterationTrace {
 public:
  void record(int iteration, double residual, double mass_error,
              double predicted = std::numeric_limits<double>::quiet_NaN()) {
    entries_.push_back({iteration, residual, mass_error, predicted});
  }

  const std::vector<TraceEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TraceEntry& back() const { return entries_.back(); }
  const TraceEntry& operator[](std::size_t i) const { return entries_[i]; }

  double max_abs_mass_error() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.mass_error));
    return m;
  }

  CsvTable to_csv() const {
    CsvTable t({"iteration", "residual", "mass_error", "predicted_error"});
    for (const auto& e : entries_)
      t.add_row({static_cast<long long>(e.iteration), e.residual, e.mass_error,
                 e.predicted_error});
    return t;
  }

 private:
  std::vector<TraceEntry> entries_;
};

}  // namespace conserva
