#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace splitring {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a maximum of f on [lo, hi], stopping once the
/// bracket is narrower than `tol`. Assumes f is unimodal on the bracket.
ScalarOptimum golden_section_max(const std::function<double(double)>& f, double lo,
                                 double hi, double tol);

struct SimplexOptions {
  std::size_t max_iterations = 20000;
  double relative_tol = 1e-10;   // on the objective change
  double absolute_tol = 0.0;     // added to the relative threshold
  std::size_t stall_window = 20; // iterations the change must stay below tol
  double initial_step = 0.05;    // per coordinate, relative to the bound width
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Nelder-Mead minimisation inside the box [lower, upper]; trial points
/// leaving the box are reflected back across the violated face.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, const std::vector<double>& lower,
                          const std::vector<double>& upper,
                          const SimplexOptions& options = {});

}  // namespace splitring
