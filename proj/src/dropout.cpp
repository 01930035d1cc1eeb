#include "dropoutlab/dropout.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "dropoutlab/criteria.hpp"
#include "dropoutlab/errors.hpp"
#include "dropoutlab/loss.hpp"

namespace dropoutlab {

DropoutConfig::DropoutConfig(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("DropoutConfig: q must lie in (0, 1), got " + std::to_string(q));
  }
}

namespace {

void check_dimension(const DiscreteSource& source, const Vector& w) {
  if (w.size() != source.dimension()) {
    throw std::invalid_argument("weight dimension " + std::to_string(w.size()) +
                                " does not match source dimension " +
                                std::to_string(source.dimension()));
  }
}

// Depth-first walk over keep/drop patterns of the active coordinates of one atom.
// Returns sums over leaves of weight * l(y m) and weight * l'(y m); keep_deriv[d]
// receives the l' sum restricted to leaves where coordinate d is kept.
class MaskWalker {
 public:
  MaskWalker(const Vector& terms, int y, double p, double q, Vector* keep_deriv)
      : terms_(terms), y_(y), p_(p), q_(q), keep_deriv_(keep_deriv) {}

  std::pair<double, double> run() { return walk(0, 0.0, 1.0); }

 private:
  std::pair<double, double> walk(std::size_t depth, double margin, double weight) {
    if (depth == terms_.size()) {
      const double z = y_ * margin;
      return {weight * logistic_loss(z), weight * logistic_loss_derivative(z)};
    }
    const auto kept = walk(depth + 1, margin + terms_[depth], weight * p_);
    const auto dropped = walk(depth + 1, margin, weight * q_);
    if (keep_deriv_ != nullptr) (*keep_deriv_)[depth] += kept.second;
    return {kept.first + dropped.first, kept.second + dropped.second};
  }

  const Vector& terms_;
  int y_;
  double p_;
  double q_;
  Vector* keep_deriv_;
};

// Expected loss under dropout where a kept coordinate contributes scale * w_i x_i.
Evaluation masked_expectation(const DiscreteSource& source, const DropoutConfig& cfg,
                              const Vector& w, double scale, bool want_gradient) {
  check_dimension(source, w);
  const std::size_t n = source.dimension();
  Evaluation out;
  if (want_gradient) out.gradient.assign(n, 0.0);

  std::vector<std::size_t> active;
  Vector terms;
  Vector keep_deriv;
  for (const auto& atom : source.atoms()) {
    active.clear();
    terms.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double product = w[i] * atom.x[i];
      if (product != 0.0) {
        active.push_back(i);
        terms.push_back(scale * product);
      }
    }
    if (active.size() > kMaxEnumerationDimension) {
      throw CapacityError("mask enumeration needs " + std::to_string(active.size()) +
                          " active coordinates, limit is " +
                          std::to_string(kMaxEnumerationDimension));
    }
    keep_deriv.assign(active.size(), 0.0);
    MaskWalker walker(terms, atom.y, cfg.p(), cfg.q(), want_gradient ? &keep_deriv : nullptr);
    const auto [value, deriv] = walker.run();
    out.value += atom.prob * value;
    if (!want_gradient) continue;

    const double coeff = atom.prob * atom.y * scale;
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (next < active.size() && active[next] == i) {
        out.gradient[i] += coeff * atom.x[i] * keep_deriv[next];
        ++next;
      } else if (atom.x[i] != 0.0) {
        // w_i = 0: the mask bit of i is independent of the margin.
        out.gradient[i] += coeff * atom.x[i] * cfg.p() * deriv;
      }
    }
  }
  return out;
}

Pmf head_pmf_with_keep(const ExchangeableSource& source, double keep) {
  std::vector<PmfEntry> masses;
  for (const auto& h : source.head()) masses.push_back({h.value, keep * h.prob});
  masses.push_back({0.0, 1.0 - keep});
  return Pmf::from_masses(std::move(masses));
}

IntegerPmf negate(const IntegerPmf& a) {
  IntegerPmf out;
  out.offset = -(a.offset + static_cast<long>(a.prob.size()) - 1);
  out.prob.assign(a.prob.rbegin(), a.prob.rend());
  return out;
}

}  // namespace

Evaluation dropout_criterion_nu_eval(const DiscreteSource& source, const DropoutConfig& cfg,
                                     const Vector& w) {
  return masked_expectation(source, cfg, w, 1.0 / cfg.p(), true);
}

double dropout_criterion_nu(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w) {
  return masked_expectation(source, cfg, w, 1.0 / cfg.p(), false).value;
}

Evaluation dropout_criterion_r_eval(const DiscreteSource& source, const DropoutConfig& cfg,
                                    const Vector& w) {
  return masked_expectation(source, cfg, w, 1.0, true);
}

double dropout_criterion_r(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w) {
  return masked_expectation(source, cfg, w, 1.0, false).value;
}

double dropout_regularizer(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w) {
  return dropout_criterion_nu(source, cfg, w) - plain_risk(source, w);
}

double atom_regularizer(const Vector& x, const DropoutConfig& cfg, const Vector& w) {
  if (x.size() != w.size()) throw std::invalid_argument("atom_regularizer: dimension mismatch");
  Vector terms;
  double activation = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double product = w[i] * x[i];
    activation += product;
    if (product != 0.0) terms.push_back(product / cfg.p());
  }
  if (terms.size() > kMaxEnumerationDimension) {
    throw CapacityError("atom_regularizer: too many active coordinates");
  }
  const std::size_t k = terms.size();
  double expected = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    double margin = 0.0;
    double weight = 1.0;
    for (std::size_t d = 0; d < k; ++d) {
      if ((mask >> d) & 1U) {
        margin += terms[d];
        weight *= cfg.p();
      } else {
        weight *= cfg.q();
      }
    }
    expected += weight * log_two_cosh_half(margin);
  }
  return expected - log_two_cosh_half(activation);
}

double dropout_regularizer_label_free(const DiscreteSource& source, const DropoutConfig& cfg,
                                      const Vector& w) {
  check_dimension(source, w);
  double total = 0.0;
  for (const auto& atom : source.atoms()) total += atom.prob * atom_regularizer(atom.x, cfg, w);
  return total;
}

double taylor_regularizer(const DiscreteSource& source, const DropoutConfig& cfg, const Vector& w) {
  check_dimension(source, w);
  double sum = 0.0;
  for (const auto& atom : source.atoms()) {
    double activation = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) activation += w[i] * atom.x[i];
    const double weight = logistic_variance_weight(activation);
    for (std::size_t i = 0; i < w.size(); ++i) {
      sum += atom.prob * w[i] * w[i] * atom.x[i] * atom.x[i] * weight;
    }
  }
  return cfg.q() / (2.0 * cfg.p()) * sum;
}

Pmf tail_sum_pmf(const TailModel& tail, std::size_t n, double keep) {
  if (n < 2) throw std::invalid_argument("tail_sum_pmf: need n >= 2");
  if (!(keep > 0.0 && keep <= 1.0)) throw std::invalid_argument("tail_sum_pmf: keep must lie in (0, 1]");
  if (const auto* fc = std::get_if<FixedComposition>(&tail)) {
    if (fc->num_plus + fc->num_minus != n - 1) {
      throw std::invalid_argument("tail_sum_pmf: composition does not match n");
    }
    return convolve(binomial_pmf(fc->num_plus, keep), negate(binomial_pmf(fc->num_minus, keep)))
        .to_pmf();
  }
  const double b = std::get<IndependentSigns>(tail).bias;
  const double up = keep * (0.5 + b);
  const double down = keep * (0.5 - b);
  const double zero = 1.0 - keep;
  const std::size_t m = n - 1;
  // prob[k] = Pr(S = k - m)
  IntegerPmf acc;
  acc.offset = -static_cast<long>(m);
  acc.prob.assign(2 * m + 1, 0.0);
  acc.prob[m] = 1.0;
  Vector next(acc.prob.size());
  for (std::size_t step = 1; step <= m; ++step) {
    const std::size_t lo = m - step;
    const std::size_t hi = m + step;
    for (std::size_t k = lo; k <= hi; ++k) {
      double v = zero * acc.prob[k];
      if (k > 0) v += up * acc.prob[k - 1];
      if (k + 1 < acc.prob.size()) v += down * acc.prob[k + 1];
      next[k] = v;
    }
    for (std::size_t k = lo; k <= hi; ++k) acc.prob[k] = next[k];
  }
  return acc.to_pmf();
}

Pmf tail_sum_pmf(const TailModel& tail, std::size_t n, const DropoutConfig& cfg) {
  return tail_sum_pmf(tail, n, cfg.p());
}

Pmf head_pmf(const ExchangeableSource& source, const DropoutConfig& cfg) {
  return head_pmf_with_keep(source, cfg.p());
}

Pmf head_pmf_no_dropout(const ExchangeableSource& source) { return head_pmf_with_keep(source, 1.0); }

ReducedTables make_dropout_tables(const ExchangeableSource& source, const DropoutConfig& cfg) {
  return {head_pmf(source, cfg), tail_sum_pmf(source.tail(), source.dimension(), cfg)};
}

ReducedTables make_no_dropout_tables(const ExchangeableSource& source) {
  return {head_pmf_no_dropout(source), tail_sum_pmf(source.tail(), source.dimension(), 1.0)};
}

Evaluation reduced_expected_loss(const ReducedTables& tables, const ReducedWeight& rw) {
  Evaluation out;
  out.gradient.assign(2, 0.0);
  for (const auto& h : tables.head.support()) {
    double value = 0.0;
    double d_head = 0.0;
    double d_tail = 0.0;
    for (const auto& s : tables.tail.support()) {
      const double z = rw.w1 * h.value + rw.w2 * s.value;
      const double deriv = s.prob * logistic_loss_derivative(z);
      value += s.prob * logistic_loss(z);
      d_head += deriv;
      d_tail += deriv * s.value;
    }
    out.value += h.prob * value;
    out.gradient[0] += h.prob * h.value * d_head;
    out.gradient[1] += h.prob * d_tail;
  }
  return out;
}

double reduced_dropout_criterion(const ExchangeableSource& source, const DropoutConfig& cfg,
                                 const ReducedWeight& rw) {
  return reduced_expected_loss(make_dropout_tables(source, cfg), rw).value;
}

ReducedWeight reduced_dropout_gradient(const ExchangeableSource& source, const DropoutConfig& cfg,
                                       const ReducedWeight& rw) {
  const auto eval = reduced_expected_loss(make_dropout_tables(source, cfg), rw);
  return {eval.gradient[0], eval.gradient[1]};
}

Vector full_weights(const ReducedWeight& rw, std::size_t n) {
  Vector w(n, rw.w2);
  if (n > 0) w[0] = rw.w1;
  return w;
}

}  // namespace dropoutlab
