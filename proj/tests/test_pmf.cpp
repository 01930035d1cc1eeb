#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "dropoutlab/pmf.hpp"
#include "oracles.hpp"

using namespace dropoutlab;

TEST(Pmf, MergesSortsAndDropsZeros) {
  const auto p = Pmf::from_masses({{2.0, 0.25}, {-1.0, 0.5}, {2.0, 0.25}, {7.0, 0.0}});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p.support()[0].value, -1.0);
  EXPECT_DOUBLE_EQ(p.support()[1].prob, 0.5);
  EXPECT_DOUBLE_EQ(p.prob_of(7.0), 0.0);
  EXPECT_DOUBLE_EQ(p.mean(), 0.5);
  EXPECT_NEAR(p.total(), 1.0, 1e-15);
}

TEST(Pmf, RejectsBadMass) {
  EXPECT_THROW(Pmf::from_masses({{0.0, 0.5}}), std::logic_error);
  EXPECT_THROW(Pmf::from_masses({{0.0, 1.5}, {1.0, -0.5}}), std::logic_error);
}

TEST(Pmf, Delta) {
  const auto d = Pmf::delta(3.5);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d.prob_of(3.5), 1.0);
}

TEST(BinomialPmf, MatchesClosedForm) {
  for (unsigned n : {0u, 1u, 5u, 30u}) {
    for (double s : {0.1, 0.5, 0.77}) {
      const auto b = binomial_pmf(n, s);
      EXPECT_EQ(b.offset, 0);
      ASSERT_EQ(b.prob.size(), n + 1);
      for (unsigned k = 0; k <= n; ++k) EXPECT_NEAR(b.prob[k], oracle::binomial(n, k, s), 1e-13);
    }
  }
}

TEST(Convolve, TwoDice) {
  IntegerPmf die{1, std::vector<double>(6, 1.0 / 6.0)};
  const auto two = convolve(die, die);
  EXPECT_EQ(two.offset, 2);
  ASSERT_EQ(two.prob.size(), 11u);
  EXPECT_NEAR(two.prob[5], 6.0 / 36.0, 1e-15);
  EXPECT_NEAR(two.prob[0], 1.0 / 36.0, 1e-15);
  const auto p = two.to_pmf();
  EXPECT_NEAR(p.mean(), 7.0, 1e-13);
}
