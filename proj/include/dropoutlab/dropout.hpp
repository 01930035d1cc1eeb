#pragma once

#include <cstddef>

#include "dropoutlab/pmf.hpp"
#include "dropoutlab/source.hpp"

namespace dropoutlab {

/// Dropout noise: each feature is dropped with probability q and kept with
/// probability p = 1 - q.
class DropoutConfig {
 public:
  explicit DropoutConfig(double q);

  double q() const { return q_; }
  double p() const { return 1.0 - q_; }

 private:
  double q_;
};

/// Value and gradient of a smooth objective at one point.
struct Evaluation {
  double value = 0.0;
  Vector gradient;
};

/// Mask enumeration is limited to this many coordinates with w_i x_i != 0
/// per atom (2^25 patterns).
inline constexpr std::size_t kMaxEnumerationDimension = 25;

/// E l(y w.(x + nu)): additive-noise dropout criterion, kept features scaled by 1/p.
double dropout_criterion_nu(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w);
Evaluation dropout_criterion_nu_eval(const DiscreteSource& source, const DropoutConfig& cfg,
                                     const Vector& w);

/// E l(y w.(r o x)): multiplicative-mask criterion, kept features unscaled.
/// J_nu(w) = J_r(w / p).
double dropout_criterion_r(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w);
Evaluation dropout_criterion_r_eval(const DiscreteSource& source, const DropoutConfig& cfg,
                                    const Vector& w);

/// The dropout penalty reg(w) = J_nu(w) - E l(y w.x).
double dropout_regularizer(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w);

/// Per-atom label-free regularizer:
///   E_nu ln((e^{w.(x+nu)/2} + e^{-w.(x+nu)/2}) / (e^{w.x/2} + e^{-w.x/2})).
/// Non-negative by Jensen.
double atom_regularizer(const Vector& x, const DropoutConfig& cfg, const Vector& w);

/// reg(w) computed atom by atom through atom_regularizer; never looks at labels.
double dropout_regularizer_label_free(const DiscreteSource& source, const DropoutConfig& cfg,
                                      const Vector& w);

/// Second-order approximation
///   q / (2(1-q)) sum_i w_i^2 E[x_i^2 / ((1 + e^{-w.x/2})(1 + e^{w.x/2}))].
double taylor_regularizer(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w);

/// Exact law of sum_{i>=2} r_i x_i for the tail of an n-feature source, with
/// labels clamped at +1. `keep` is the keep probability; 1 means no dropout.
Pmf tail_sum_pmf(const TailModel& tail, std::size_t n, double keep);
Pmf tail_sum_pmf(const TailModel& tail, std::size_t n, const DropoutConfig& cfg);

/// Law of x_1 r_1 given y = +1.
Pmf head_pmf(const ExchangeableSource& source, const DropoutConfig& cfg);

/// Law of x_1 given y = +1 (no dropout).
Pmf head_pmf_no_dropout(const ExchangeableSource& source);

/// Weight vector of the form (w1, w2, w2, ..., w2).
struct ReducedWeight {
  double w1 = 0.0;
  double w2 = 0.0;
};

/// Precomputed head and tail laws; K(w1, w2) = E l(w1 h + w2 s).
struct ReducedTables {
  Pmf head;
  Pmf tail;
};

ReducedTables make_dropout_tables(const ExchangeableSource& source, const DropoutConfig& cfg);
ReducedTables make_no_dropout_tables(const ExchangeableSource& source);

/// E over independent head h and tail s of l(w1 h + w2 s), with gradient.
Evaluation reduced_expected_loss(const ReducedTables& tables, const ReducedWeight& rw);

/// K(w1, w2) = J_r(w1, w2, ..., w2) for the exchangeable source.
double reduced_dropout_criterion(const ExchangeableSource& source, const DropoutConfig& cfg,
                                 const ReducedWeight& rw);

/// (dK/dw1, dK/dw2).
ReducedWeight reduced_dropout_gradient(const ExchangeableSource& source, const DropoutConfig& cfg,
                                       const ReducedWeight& rw);

/// Expands (w1, w2) to the full n-vector (w1, w2, ..., w2).
Vector full_weights(const ReducedWeight& rw, std::size_t n);

}  // namespace dropoutlab
