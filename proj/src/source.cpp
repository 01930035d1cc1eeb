#include "dropoutlab/source.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dropoutlab {

namespace {

void check_normalized(double total, const char* what) {
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument(std::string(what) + ": probabilities sum to " +
                                std::to_string(total) + ", expected 1");
  }
}

}  // namespace

DiscreteSource::DiscreteSource(std::size_t n, std::vector<LabeledAtom> atoms)
    : n_(n), atoms_(std::move(atoms)) {
  if (n_ == 0) throw std::invalid_argument("DiscreteSource: dimension must be positive");
  if (atoms_.empty()) throw std::invalid_argument("DiscreteSource: empty support");
  double total = 0.0;
  for (const auto& atom : atoms_) {
    if (atom.x.size() != n_) {
      throw std::invalid_argument("DiscreteSource: atom dimension mismatch");
    }
    if (atom.y != 1 && atom.y != -1) {
      throw std::invalid_argument("DiscreteSource: label must be +1 or -1");
    }
    if (!(atom.prob > 0.0) || atom.prob > 1.0) {
      throw std::invalid_argument("DiscreteSource: atom probability must lie in (0, 1]");
    }
    for (double v : atom.x) {
      if (!std::isfinite(v)) throw std::invalid_argument("DiscreteSource: non-finite feature");
    }
    total += atom.prob;
  }
  check_normalized(total, "DiscreteSource");
}

ExchangeableSource::ExchangeableSource(std::size_t n, std::vector<HeadValue> head,
                                       TailModel tail, bool label_symmetric)
    : n_(n), head_(std::move(head)), tail_(tail), label_symmetric_(label_symmetric) {
  if (n_ < 2) throw std::invalid_argument("ExchangeableSource: need n >= 2");
  if (head_.empty()) throw std::invalid_argument("ExchangeableSource: empty head");
  double total = 0.0;
  for (const auto& h : head_) {
    if (!std::isfinite(h.value)) throw std::invalid_argument("ExchangeableSource: non-finite head value");
    if (h.prob < 0.0 || h.prob > 1.0) {
      throw std::invalid_argument("ExchangeableSource: head probability outside [0, 1]");
    }
    total += h.prob;
  }
  check_normalized(total, "ExchangeableSource head");
  if (const auto* fc = std::get_if<FixedComposition>(&tail_)) {
    if (fc->num_plus + fc->num_minus != n_ - 1) {
      throw std::invalid_argument("FixedComposition: counts must sum to n-1");
    }
  } else {
    const double b = std::get<IndependentSigns>(tail_).bias;
    if (!(b > 0.0 && b < 0.5)) throw std::invalid_argument("IndependentSigns: bias must lie in (0, 1/2)");
  }
}

DiscreteSource build_p5() {
  const double third = 1.0 / 3.0;
  return DiscreteSource(2, {
                               {{10.0, -1.0}, 1, third},
                               {{1.1, -1.0}, 1, third},
                               {{-1.0, 1.1}, 1, third},
                           });
}

DiscreteSource build_p6() {
  return DiscreteSource(2, {
                               {{1.0, 0.0}, 1, 3.0 / 7.0},
                               {{-1.0 / 1000.0, 1.0}, 1, 3.0 / 7.0},
                               {{1.0 / 10.0, -1.0}, 1, 1.0 / 7.0},
                           });
}

ExchangeableSource build_p7(std::size_t n) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("build_p7: n must be even and >= 4");
  return ExchangeableSource(n, {{1.0, 9.0 / 10.0}, {-1.0, 1.0 / 10.0}},
                            FixedComposition{n / 2, n / 2 - 1}, false);
}

ExchangeableSource build_p8(std::size_t n, double eta, double alpha, double beta) {
  if (n < 2) throw std::invalid_argument("build_p8: n must be >= 2");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("build_p8: eta must lie in [0, 1]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("build_p8: alpha must be positive");
  if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("build_p8: beta must lie in (0, 1/2)");
  return ExchangeableSource(n, {{alpha, 1.0 - eta}, {-alpha, eta}}, IndependentSigns{beta}, true);
}

DiscreteSource point_mass(Vector x, int y) {
  const std::size_t n = x.size();
  return DiscreteSource(n, {{std::move(x), y, 1.0}});
}

bool is_perfect_modulo_ties(const DiscreteSource& source, std::size_t feature) {
  if (feature >= source.dimension()) throw std::out_of_range("is_perfect_modulo_ties: feature index out of range");
  bool any_positive = false;
  bool any_negative = false;
  for (const auto& atom : source.atoms()) {
    const double signed_value = atom.y * atom.x[feature];
    any_positive = any_positive || signed_value > 0.0;
    any_negative = any_negative || signed_value < 0.0;
  }
  return !(any_positive && any_negative);
}

bool has_unique_dropout_minimizer(const DiscreteSource& source) {
  for (std::size_t i = 0; i < source.dimension(); ++i) {
    if (is_perfect_modulo_ties(source, i)) return false;
  }
  return true;
}

bool has_unique_dropout_minimizer(const ExchangeableSource& source) {
  // y*x_1 has the distribution of the head (labels are clamped at +1).
  bool head_positive = false;
  bool head_negative = false;
  for (const auto& h : source.head()) {
    if (h.prob <= 0.0) continue;
    head_positive = head_positive || h.value > 0.0;
    head_negative = head_negative || h.value < 0.0;
  }
  if (!(head_positive && head_negative)) return false;
  if (const auto* fc = std::get_if<FixedComposition>(&source.tail())) {
    return fc->num_plus > 0 && fc->num_minus > 0;
  }
  return true;  // IndependentSigns with bias in (0, 1/2) realizes both signs.
}

namespace {

// Enumerates the +1/-1 arrangements of a fixed composition in lexicographic order.
void arrangements(std::size_t slots, std::size_t plus_left, Vector& current,
                  std::vector<Vector>& out) {
  if (current.size() == slots) {
    out.push_back(current);
    return;
  }
  const std::size_t remaining = slots - current.size();
  if (plus_left < remaining) {
    current.push_back(-1.0);
    arrangements(slots, plus_left, current, out);
    current.pop_back();
  }
  if (plus_left > 0) {
    current.push_back(1.0);
    arrangements(slots, plus_left - 1, current, out);
    current.pop_back();
  }
}

}  // namespace

DiscreteSource expand(const ExchangeableSource& source) {
  const std::size_t n = source.dimension();
  if (n > kMaxExpansionDimension) throw std::invalid_argument("expand: dimension too large");
  const std::size_t tail_len = n - 1;

  std::vector<std::pair<Vector, double>> tails;
  if (const auto* fc = std::get_if<FixedComposition>(&source.tail())) {
    std::vector<Vector> all;
    Vector current;
    arrangements(tail_len, fc->num_plus, current, all);
    const double each = 1.0 / static_cast<double>(all.size());
    for (auto& t : all) tails.emplace_back(std::move(t), each);
  } else {
    const double b = std::get<IndependentSigns>(source.tail()).bias;
    for (std::size_t mask = 0; mask < (std::size_t{1} << tail_len); ++mask) {
      Vector t(tail_len);
      double prob = 1.0;
      for (std::size_t i = 0; i < tail_len; ++i) {
        const bool agrees = (mask >> i) & 1U;
        t[i] = agrees ? 1.0 : -1.0;
        prob *= agrees ? 0.5 + b : 0.5 - b;
      }
      tails.emplace_back(std::move(t), prob);
    }
  }

  std::vector<LabeledAtom> atoms;
  const double label_weight = source.label_symmetric() ? 0.5 : 1.0;
  for (const auto& h : source.head()) {
    if (h.prob <= 0.0) continue;
    for (const auto& [t, tp] : tails) {
      Vector x(n);
      x[0] = h.value;
      for (std::size_t i = 0; i < tail_len; ++i) x[i + 1] = t[i];
      const double prob = label_weight * h.prob * tp;
      if (source.label_symmetric()) {
        Vector mirrored(n);
        for (std::size_t i = 0; i < n; ++i) mirrored[i] = -x[i];
        atoms.push_back({x, 1, prob});
        atoms.push_back({std::move(mirrored), -1, prob});
      } else {
        atoms.push_back({std::move(x), 1, prob});
      }
    }
  }
  // Renormalize away accumulated rounding so the source validates.
  double total = 0.0;
  for (const auto& a : atoms) total += a.prob;
  for (auto& a : atoms) a.prob /= total;
  return DiscreteSource(n, std::move(atoms));
}

}  // namespace dropoutlab
