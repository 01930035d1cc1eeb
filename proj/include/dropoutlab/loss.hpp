#pragma once

namespace dropoutlab {

/// ln(1 + e^{-z}), evaluated without overflow for any finite z.
double logistic_loss(double z);

/// d/dz ln(1 + e^{-z}) = -1 / (1 + e^{z}); always in [-1, 0].
double logistic_loss_derivative(double z);

/// ln(e^{t/2} + e^{-t/2}). The label-free part of the logistic loss.
double log_two_cosh_half(double t);

/// The logistic loss written as ln((e^{a/2} + e^{-a/2}) / e^{y a/2}) with
/// a = w.x. Equals logistic_loss(y * a).
double symmetric_form_check(double activation, int y);

/// 1 / ((1 + e^{-a/2}) (1 + e^{a/2})), the logistic variance weight at a/2.
double logistic_variance_weight(double activation);

}  // namespace dropoutlab
