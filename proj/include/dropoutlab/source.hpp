#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

namespace dropoutlab {

using Vector = std::vector<double>;

/// One support point of a labeled source: feature vector, label, probability.
struct LabeledAtom {
  Vector x;
  int y = 1;
  double prob = 0.0;
};

/// A finite-support joint distribution over (x, y) pairs.
///
/// The constructor throws std::invalid_argument unless atoms are finite
/// n-vectors with labels in {-1, +1} and positive masses summing to one
/// within 1e-12.
class DiscreteSource {
 public:
  DiscreteSource(std::size_t n, std::vector<LabeledAtom> atoms);

  std::size_t dimension() const { return n_; }
  const std::vector<LabeledAtom>& atoms() const { return atoms_; }

 private:
  std::size_t n_;
  std::vector<LabeledAtom> atoms_;
};

inline constexpr double kNormalizationTolerance = 1e-12;

/// Tail features 2..n carry exactly num_plus (+1) and num_minus (-1) entries,
/// uniformly arranged.
struct FixedComposition {
  std::size_t num_plus = 0;
  std::size_t num_minus = 0;
};

/// Tail features are i.i.d. given y: x_i = y with probability 1/2 + bias.
struct IndependentSigns {
  double bias = 0.0;
};

using TailModel = std::variant<FixedComposition, IndependentSigns>;

/// (value, probability) for the head feature conditioned on y = +1.
struct HeadValue {
  double value = 0.0;
  double prob = 0.0;
};

/// A source whose last n-1 features are exchangeable.
///
/// Only the y = +1 conditional is stored. When label_symmetric is set, y is
/// +1 or -1 with equal probability and the y = -1 conditional is the mirror
/// image, so every label-weighted quantity equals its y = +1 value.
class ExchangeableSource {
 public:
  ExchangeableSource(std::size_t n, std::vector<HeadValue> head, TailModel tail,
                     bool label_symmetric);

  std::size_t dimension() const { return n_; }
  const std::vector<HeadValue>& head() const { return head_; }
  const TailModel& tail() const { return tail_; }
  bool label_symmetric() const { return label_symmetric_; }

 private:
  std::size_t n_;
  std::vector<HeadValue> head_;
  TailModel tail_;
  bool label_symmetric_;
};

/// Three-atom source over R^2 on which L2 regularization beats dropout.
DiscreteSource build_p5();

/// Three-atom source over R^2 on which dropout beats L2 regularization.
DiscreteSource build_p6();

/// All-positive-label source with a 9/10-accurate head feature and a tail
/// holding n/2 plus and n/2-1 minus entries. Requires even n >= 4.
ExchangeableSource build_p7(std::size_t n);

/// Label-symmetric source: x_1 = alpha*y w.p. 1-eta (else -alpha*y), tail
/// features agree with y w.p. 1/2 + beta.
ExchangeableSource build_p8(std::size_t n, double eta, double alpha, double beta);

/// Point mass at a single feature vector with label +1.
DiscreteSource point_mass(Vector x, int y = 1);

/// Whether feature `feature` (0-based) has y*x_i of a single sign on the support.
bool is_perfect_modulo_ties(const DiscreteSource& source, std::size_t feature);

/// True iff no feature is perfect modulo ties.
bool has_unique_dropout_minimizer(const DiscreteSource& source);
bool has_unique_dropout_minimizer(const ExchangeableSource& source);

/// Largest n for which expand() is supported.
inline constexpr std::size_t kMaxExpansionDimension = 12;

/// Enumerates every realizable full feature vector of an exchangeable source.
/// Intended for cross-checking reduced formulas at small n.
DiscreteSource expand(const ExchangeableSource& source);

}  // namespace dropoutlab
