#include <cmath>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>

#include "dropoutlab/source.hpp"

using namespace dropoutlab;

namespace {

double total_prob(const DiscreteSource& s) {
  double t = 0.0;
  for (const auto& a : s.atoms()) t += a.prob;
  return t;
}

}  // namespace

TEST(Source, P5AtomsAndProbabilities) {
  const auto s = build_p5();
  ASSERT_EQ(s.dimension(), 2u);
  ASSERT_EQ(s.atoms().size(), 3u);
  EXPECT_EQ(s.atoms()[0].x, (Vector{10.0, -1.0}));
  EXPECT_EQ(s.atoms()[1].x, (Vector{1.1, -1.0}));
  EXPECT_EQ(s.atoms()[2].x, (Vector{-1.0, 1.1}));
  for (const auto& a : s.atoms()) {
    EXPECT_EQ(a.y, 1);
    EXPECT_DOUBLE_EQ(a.prob, 1.0 / 3.0);
  }
  EXPECT_NEAR(total_prob(s), 1.0, 1e-15);
}

TEST(Source, P6AtomsAndProbabilities) {
  const auto s = build_p6();
  ASSERT_EQ(s.atoms().size(), 3u);
  EXPECT_DOUBLE_EQ(s.atoms()[0].prob, 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(s.atoms()[1].prob, 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(s.atoms()[2].prob, 1.0 / 7.0);
  EXPECT_EQ(s.atoms()[1].x, (Vector{-0.001, 1.0}));
  EXPECT_NEAR(total_prob(s), 1.0, 1e-15);
}

TEST(Source, PerfectModuloTies) {
  EXPECT_FALSE(is_perfect_modulo_ties(build_p5(), 0));
  EXPECT_FALSE(is_perfect_modulo_ties(build_p5(), 1));
  EXPECT_FALSE(is_perfect_modulo_ties(build_p6(), 1));
  EXPECT_TRUE(is_perfect_modulo_ties(point_mass({1.0, 1.0}), 0));
  EXPECT_THROW(is_perfect_modulo_ties(build_p5(), 2), std::out_of_range);
}

TEST(Source, UniquenessPredicate) {
  EXPECT_TRUE(has_unique_dropout_minimizer(build_p5()));
  EXPECT_TRUE(has_unique_dropout_minimizer(build_p6()));
  EXPECT_TRUE(has_unique_dropout_minimizer(build_p7(4)));
  EXPECT_TRUE(has_unique_dropout_minimizer(expand(build_p7(4))));
  EXPECT_FALSE(has_unique_dropout_minimizer(point_mass({1.0, 1.0})));
  EXPECT_FALSE(has_unique_dropout_minimizer(point_mass({-2.0, 0.5}, -1)));
}

TEST(Source, P7Composition) {
  const auto s4 = build_p7(4);
  const auto& tail = std::get<FixedComposition>(s4.tail());
  EXPECT_EQ(tail.num_plus, 2u);
  EXPECT_EQ(tail.num_minus, 1u);
  EXPECT_EQ(tail.num_plus + tail.num_minus, 3u);
  ASSERT_EQ(s4.head().size(), 2u);
  EXPECT_DOUBLE_EQ(s4.head()[0].value, 1.0);
  EXPECT_DOUBLE_EQ(s4.head()[0].prob, 0.9);
  EXPECT_DOUBLE_EQ(s4.head()[1].value, -1.0);
  EXPECT_DOUBLE_EQ(s4.head()[1].prob, 0.1);
  const auto& t126 = std::get<FixedComposition>(build_p7(126).tail());
  EXPECT_EQ(t126.num_plus, 63u);
  EXPECT_EQ(t126.num_minus, 62u);
  EXPECT_THROW(build_p7(5), std::invalid_argument);
  EXPECT_THROW(build_p7(2), std::invalid_argument);
}

TEST(Source, P8Head) {
  const double beta = 1.0 / (10.0 * std::sqrt(99.0));
  const auto s = build_p8(100, 0.0, 0.01, beta);
  EXPECT_DOUBLE_EQ(s.head()[0].value, 0.01);
  EXPECT_DOUBLE_EQ(s.head()[0].prob, 1.0);
  EXPECT_DOUBLE_EQ(s.head()[1].prob, 0.0);
  EXPECT_TRUE(s.label_symmetric());

  // The rule sign(x1) errs exactly when the head is flipped.
  const auto noisy = build_p8(100, 0.3, 0.01, beta);
  double err = 0.0;
  for (const auto& h : noisy.head()) {
    if (h.value <= 0.0) err += h.prob;
  }
  EXPECT_NEAR(err, 0.3, 1e-15);
  EXPECT_THROW(build_p8(100, 0.1, 0.01, 0.6), std::invalid_argument);
  EXPECT_THROW(build_p8(100, 0.1, -1.0, beta), std::invalid_argument);
}

TEST(Source, ValidationRejectsBadAtoms) {
  EXPECT_THROW(DiscreteSource(2, {{{1.0, 1.0}, 1, 0.5}}), std::invalid_argument);
  EXPECT_THROW(DiscreteSource(2, {{{1.0}, 1, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DiscreteSource(1, {{{1.0}, 0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DiscreteSource(1, {{{NAN}, 1, 1.0}}), std::invalid_argument);
}

TEST(Source, ExpandP7N4) {
  const auto d = expand(build_p7(4));
  EXPECT_EQ(d.dimension(), 4u);
  EXPECT_NEAR(total_prob(d), 1.0, 1e-12);
  // Every realization has tail sum 1 and label +1.
  for (const auto& a : d.atoms()) {
    EXPECT_EQ(a.y, 1);
    EXPECT_DOUBLE_EQ(a.x[1] + a.x[2] + a.x[3], 1.0);
  }
  EXPECT_THROW(expand(build_p7(14)), std::invalid_argument);
}

TEST(Source, ExpandSymmetricSourceMirrorsLabels) {
  const auto d = expand(build_p8(3, 0.2, 1.0, 0.1));
  double pos = 0.0;
  for (const auto& a : d.atoms()) {
    if (a.y == 1) pos += a.prob;
  }
  EXPECT_NEAR(pos, 0.5, 1e-12);
}
