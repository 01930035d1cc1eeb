#pragma once

#include <memory>
#include <string>
#include <variant>

#include "dropoutlab/dropout.hpp"
#include "dropoutlab/source.hpp"

namespace dropoutlab {

enum class CriterionKind { Plain, DropoutNu, DropoutR, L2, L1, ReducedDropout, ReducedL2 };

/// Stable lowercase name used in JSON and on the command line.
std::string to_string(CriterionKind kind);
CriterionKind criterion_kind_from_string(const std::string& name);

using SourceVariant = std::variant<DiscreteSource, ExchangeableSource>;

/// An objective over weight vectors. Reduced kinds live on (w1, w2) and need an
/// exchangeable source; every other kind needs a discrete source.
class Criterion {
 public:
  static Criterion plain(DiscreteSource source);
  static Criterion dropout_nu(DiscreteSource source, double q);
  static Criterion dropout_r(DiscreteSource source, double q);
  static Criterion l2(DiscreteSource source, double lambda);
  static Criterion l1(DiscreteSource source, double lambda);
  static Criterion reduced_dropout(ExchangeableSource source, double q);
  static Criterion reduced_l2(ExchangeableSource source, double lambda);

  CriterionKind kind() const { return kind_; }
  /// Drop probability; zero for non-dropout kinds.
  double q() const { return q_; }
  /// Penalty weight; zero for non-penalized kinds.
  double lambda() const { return lambda_; }

  bool is_reduced() const;
  bool is_smooth() const { return kind_ != CriterionKind::L1; }
  bool is_dropout() const;
  /// Number of free weights (2 for reduced kinds).
  std::size_t dimension() const;

  const SourceVariant& source() const { return source_; }
  const DiscreteSource& discrete() const;
  const ExchangeableSource& exchangeable() const;
  /// Head and tail laws for reduced kinds.
  const ReducedTables& tables() const;

 private:
  Criterion(CriterionKind kind, SourceVariant source, double q, double lambda);

  CriterionKind kind_;
  SourceVariant source_;
  double q_;
  double lambda_;
  std::shared_ptr<const ReducedTables> tables_;
};

double plain_risk(const DiscreteSource& source, const Vector& w);
Vector plain_risk_gradient(const DiscreteSource& source, const Vector& w);

double l2_criterion(const DiscreteSource& source, double lambda, const Vector& w);
Vector l2_gradient(const DiscreteSource& source, double lambda, const Vector& w);

double l1_criterion(const DiscreteSource& source, double lambda, const Vector& w);

/// E l(w1 x_1 + w2 S0) + (lambda/2)(w1^2 + (n-1) w2^2) with S0 the undropped tail sum.
double reduced_l2_criterion(const ExchangeableSource& source, double lambda, const ReducedWeight& rw);
ReducedWeight reduced_l2_gradient(const ExchangeableSource& source, double lambda,
                                  const ReducedWeight& rw);

double criterion_value(const Criterion& c, const Vector& w);
/// Throws NonsmoothGradientError for L1.
Vector criterion_gradient(const Criterion& c, const Vector& w);
/// Value and gradient together. Throws NonsmoothGradientError for L1.
Evaluation criterion_evaluate(const Criterion& c, const Vector& w);

}  // namespace dropoutlab
