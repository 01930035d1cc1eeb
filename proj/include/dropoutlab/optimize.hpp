#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dropoutlab/criteria.hpp"

namespace dropoutlab {

using WeightVector = Vector;

struct SolverConfig {
  /// Bound on the gradient infinity-norm (or prox residual for L1).
  double tolerance = 1e-10;
  std::size_t max_iterations = 200000;
  /// Starting point; zero when empty.
  WeightVector initial_point;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;

  void validate() const;
};

struct OptimizationResult {
  WeightVector minimizer;
  double value = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string method;
};

/// Minimizes a criterion from the configured start.
///
/// Smooth kinds use backtracking gradient descent in coordinates rescaled by the
/// feature magnitude; problems with at most two weights are then polished by
/// damped Newton (skipped for the plain risk, whose infimum may not be
/// attained). L1 uses proximal gradient with a Newton polish on the support.
/// Dropout kinds throw NoUniqueMinimizerError when some feature is perfect
/// modulo ties.
OptimizationResult minimize(const Criterion& c, const SolverConfig& cfg = {});

/// Central differences with step h * max(1, |w_i|) per coordinate.
WeightVector finite_difference_gradient(const Criterion& c, const WeightVector& w, double h = 1e-6);

/// origin + t * direction.
struct Ray {
  WeightVector origin;
  WeightVector direction;

  WeightVector at(double t) const;
};

struct RayGradient {
  double param = 0.0;
  WeightVector gradient;
};

/// Analytic gradient at each grid parameter along the ray.
std::vector<RayGradient> gradient_sign_scan(const Criterion& c, const Ray& ray,
                                            const std::vector<double>& grid);

/// Per-coordinate magnitude used to rescale weights before descent.
Vector coordinate_scales(const Criterion& c);

}  // namespace dropoutlab
