#include "dropoutlab/loss.hpp"

#include <cmath>

namespace dropoutlab {

double logistic_loss(double z) {
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double logistic_loss_derivative(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

double log_two_cosh_half(double t) {
  const double a = std::abs(t);
  return 0.5 * a + std::log1p(std::exp(-a));
}

double symmetric_form_check(double activation, int y) {
  // Group the linear parts first: |a|/2 - y a/2 is exactly 0 or |a|.
  const double a = std::abs(activation);
  return (0.5 * a - 0.5 * y * activation) + std::log1p(std::exp(-a));
}

double logistic_variance_weight(double activation) {
  const double e = std::exp(-0.5 * std::abs(activation));
  const double d = 1.0 + e;
  return e / (d * d);
}

}  // namespace dropoutlab
