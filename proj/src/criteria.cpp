#include "dropoutlab/criteria.hpp"

#include <cmath>
#include <stdexcept>

#include "dropoutlab/errors.hpp"
#include "dropoutlab/loss.hpp"

namespace dropoutlab {

std::string to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::Plain: return "plain";
    case CriterionKind::DropoutNu: return "dropout_nu";
    case CriterionKind::DropoutR: return "dropout_r";
    case CriterionKind::L2: return "l2";
    case CriterionKind::L1: return "l1";
    case CriterionKind::ReducedDropout: return "reduced_dropout";
    case CriterionKind::ReducedL2: return "reduced_l2";
  }
  throw std::logic_error("unknown criterion kind");
}

CriterionKind criterion_kind_from_string(const std::string& name) {
  for (auto kind : {CriterionKind::Plain, CriterionKind::DropoutNu, CriterionKind::DropoutR,
                    CriterionKind::L2, CriterionKind::L1, CriterionKind::ReducedDropout,
                    CriterionKind::ReducedL2}) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "dropout") return CriterionKind::DropoutNu;
  throw std::invalid_argument("unknown criterion kind '" + name + "'");
}

Criterion::Criterion(CriterionKind kind, SourceVariant source, double q, double lambda)
    : kind_(kind), source_(std::move(source)), q_(q), lambda_(lambda) {
  if (is_dropout()) static_cast<void>(DropoutConfig{q_});
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("Criterion: lambda must be finite and non-negative");
  }
  if (kind_ == CriterionKind::ReducedDropout) {
    tables_ = std::make_shared<ReducedTables>(make_dropout_tables(exchangeable(), DropoutConfig{q_}));
  } else if (kind_ == CriterionKind::ReducedL2) {
    tables_ = std::make_shared<ReducedTables>(make_no_dropout_tables(exchangeable()));
  }
}

Criterion Criterion::plain(DiscreteSource source) {
  return Criterion(CriterionKind::Plain, std::move(source), 0.0, 0.0);
}
Criterion Criterion::dropout_nu(DiscreteSource source, double q) {
  return Criterion(CriterionKind::DropoutNu, std::move(source), q, 0.0);
}
Criterion Criterion::dropout_r(DiscreteSource source, double q) {
  return Criterion(CriterionKind::DropoutR, std::move(source), q, 0.0);
}
Criterion Criterion::l2(DiscreteSource source, double lambda) {
  return Criterion(CriterionKind::L2, std::move(source), 0.0, lambda);
}
Criterion Criterion::l1(DiscreteSource source, double lambda) {
  return Criterion(CriterionKind::L1, std::move(source), 0.0, lambda);
}
Criterion Criterion::reduced_dropout(ExchangeableSource source, double q) {
  return Criterion(CriterionKind::ReducedDropout, std::move(source), q, 0.0);
}
Criterion Criterion::reduced_l2(ExchangeableSource source, double lambda) {
  return Criterion(CriterionKind::ReducedL2, std::move(source), 0.0, lambda);
}

bool Criterion::is_reduced() const {
  return kind_ == CriterionKind::ReducedDropout || kind_ == CriterionKind::ReducedL2;
}

bool Criterion::is_dropout() const {
  return kind_ == CriterionKind::DropoutNu || kind_ == CriterionKind::DropoutR ||
         kind_ == CriterionKind::ReducedDropout;
}

std::size_t Criterion::dimension() const {
  if (is_reduced()) return 2;
  return discrete().dimension();
}

const DiscreteSource& Criterion::discrete() const {
  if (const auto* d = std::get_if<DiscreteSource>(&source_)) return *d;
  throw std::invalid_argument("criterion " + to_string(kind_) + " needs a discrete source");
}

const ExchangeableSource& Criterion::exchangeable() const {
  if (const auto* e = std::get_if<ExchangeableSource>(&source_)) return *e;
  throw std::invalid_argument("criterion " + to_string(kind_) + " needs an exchangeable source");
}

const ReducedTables& Criterion::tables() const {
  if (!tables_) throw std::logic_error("criterion has no reduced tables");
  return *tables_;
}

namespace {

void check_dimension(std::size_t expected, const Vector& w) {
  if (w.size() != expected) {
    throw std::invalid_argument("weight dimension " + std::to_string(w.size()) + ", expected " +
                                std::to_string(expected));
  }
}

double activation(const Vector& x, const Vector& w) {
  double a = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) a += w[i] * x[i];
  return a;
}

double squared_norm(const Vector& w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

double reduced_penalty(std::size_t n, const ReducedWeight& rw) {
  return rw.w1 * rw.w1 + static_cast<double>(n - 1) * rw.w2 * rw.w2;
}

}  // namespace

double plain_risk(const DiscreteSource& source, const Vector& w) {
  check_dimension(source.dimension(), w);
  double risk = 0.0;
  for (const auto& atom : source.atoms()) risk += atom.prob * logistic_loss(atom.y * activation(atom.x, w));
  return risk;
}

Vector plain_risk_gradient(const DiscreteSource& source, const Vector& w) {
  check_dimension(source.dimension(), w);
  Vector g(w.size(), 0.0);
  for (const auto& atom : source.atoms()) {
    const double coeff = atom.prob * atom.y * logistic_loss_derivative(atom.y * activation(atom.x, w));
    for (std::size_t i = 0; i < w.size(); ++i) g[i] += coeff * atom.x[i];
  }
  return g;
}

double l2_criterion(const DiscreteSource& source, double lambda, const Vector& w) {
  return plain_risk(source, w) + 0.5 * lambda * squared_norm(w);
}

Vector l2_gradient(const DiscreteSource& source, double lambda, const Vector& w) {
  Vector g = plain_risk_gradient(source, w);
  for (std::size_t i = 0; i < w.size(); ++i) g[i] += lambda * w[i];
  return g;
}

double l1_criterion(const DiscreteSource& source, double lambda, const Vector& w) {
  double norm = 0.0;
  for (double v : w) norm += std::abs(v);
  return plain_risk(source, w) + lambda * norm;
}

double reduced_l2_criterion(const ExchangeableSource& source, double lambda, const ReducedWeight& rw) {
  return reduced_expected_loss(make_no_dropout_tables(source), rw).value +
         0.5 * lambda * reduced_penalty(source.dimension(), rw);
}

ReducedWeight reduced_l2_gradient(const ExchangeableSource& source, double lambda,
                                  const ReducedWeight& rw) {
  const auto eval = reduced_expected_loss(make_no_dropout_tables(source), rw);
  return {eval.gradient[0] + lambda * rw.w1,
          eval.gradient[1] + lambda * static_cast<double>(source.dimension() - 1) * rw.w2};
}

Evaluation criterion_evaluate(const Criterion& c, const Vector& w) {
  check_dimension(c.dimension(), w);
  switch (c.kind()) {
    case CriterionKind::Plain:
      return {plain_risk(c.discrete(), w), plain_risk_gradient(c.discrete(), w)};
    case CriterionKind::DropoutNu:
      return dropout_criterion_nu_eval(c.discrete(), DropoutConfig{c.q()}, w);
    case CriterionKind::DropoutR:
      return dropout_criterion_r_eval(c.discrete(), DropoutConfig{c.q()}, w);
    case CriterionKind::L2:
      return {l2_criterion(c.discrete(), c.lambda(), w), l2_gradient(c.discrete(), c.lambda(), w)};
    case CriterionKind::L1:
      throw NonsmoothGradientError("L1 criterion has no gradient; use the proximal solver");
    case CriterionKind::ReducedDropout:
      return reduced_expected_loss(c.tables(), {w[0], w[1]});
    case CriterionKind::ReducedL2: {
      const ReducedWeight rw{w[0], w[1]};
      auto eval = reduced_expected_loss(c.tables(), rw);
      const double tail = static_cast<double>(c.exchangeable().dimension() - 1);
      eval.value += 0.5 * c.lambda() * reduced_penalty(c.exchangeable().dimension(), rw);
      eval.gradient[0] += c.lambda() * rw.w1;
      eval.gradient[1] += c.lambda() * tail * rw.w2;
      return eval;
    }
  }
  throw std::logic_error("unknown criterion kind");
}

double criterion_value(const Criterion& c, const Vector& w) {
  check_dimension(c.dimension(), w);
  switch (c.kind()) {
    case CriterionKind::Plain: return plain_risk(c.discrete(), w);
    case CriterionKind::DropoutNu: return dropout_criterion_nu(c.discrete(), DropoutConfig{c.q()}, w);
    case CriterionKind::DropoutR: return dropout_criterion_r(c.discrete(), DropoutConfig{c.q()}, w);
    case CriterionKind::L2: return l2_criterion(c.discrete(), c.lambda(), w);
    case CriterionKind::L1: return l1_criterion(c.discrete(), c.lambda(), w);
    default: return criterion_evaluate(c, w).value;
  }
}

Vector criterion_gradient(const Criterion& c, const Vector& w) { return criterion_evaluate(c, w).gradient; }

}  // namespace dropoutlab
