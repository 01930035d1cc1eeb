#pragma once

#include <stdexcept>
#include <string>

namespace dropoutlab {

/// Exact mask enumeration would exceed the supported number of active coordinates.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The dropout criterion has no unique minimizer because some feature is
/// perfect modulo ties.
class NoUniqueMinimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A gradient was requested from a criterion that is not differentiable
/// everywhere (L1). Use the proximal solver instead.
class NonsmoothGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dropoutlab
