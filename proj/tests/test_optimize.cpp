#include <cmath>

#include <gtest/gtest.h>

#include "dropoutlab/analysis.hpp"
#include "dropoutlab/errors.hpp"
#include "dropoutlab/optimize.hpp"
#include "oracles.hpp"

using namespace dropoutlab;

TEST(Minimize, L2OnP5IsBayesOptimal) {
  const auto r = minimize(Criterion::l2(build_p5(), 1.0 / 50));
  ASSERT_TRUE(r.converged);
  EXPECT_GE(r.minimizer[0], r.minimizer[1]);
  EXPECT_GT(r.minimizer[1], 0.0);
  EXPECT_EQ(zero_one_error(build_p5(), r.minimizer), 0.0);
  EXPECT_LE(r.grad_norm, 1e-10);
}

TEST(Minimize, StationarityAgainstIndependentGradient) {
  // The P5 mask-form gradient written out by hand vanishes at the solver output.
  for (double q : {1.0 / 3.0, 0.5}) {
    const auto r = minimize(Criterion::dropout_r(build_p5(), q));
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(oracle::p5_dj_dw1(q, r.minimizer[0], r.minimizer[1]), 0.0, 1e-9);
    EXPECT_NEAR(oracle::p5_dj_dw2(q, r.minimizer[0], r.minimizer[1]), 0.0, 1e-9);
  }
}

TEST(Minimize, DropoutOnPointMassHasNoUniqueMinimizer) {
  EXPECT_THROW(minimize(Criterion::dropout_nu(point_mass({1.0, 1.0}), 0.5)), NoUniqueMinimizerError);
}

TEST(Minimize, PlainRiskOnSeparableSourceDoesNotConverge) {
  const auto c = Criterion::plain(build_p5());
  double prev = criterion_value(c, {0.0, 0.0});
  for (double t = 1.0; t <= 50.0; t += 1.0) {
    const double v = criterion_value(c, {t, t});
    EXPECT_LT(v, prev);
    prev = v;
  }
  SolverConfig cfg;
  cfg.max_iterations = 2000;
  const auto r = minimize(c, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2000u);
}

TEST(Minimize, ReducedDropoutMatchesExpandedSolve) {
  const auto reduced = minimize(Criterion::reduced_dropout(build_p7(4), 0.5));
  const auto full = minimize(Criterion::dropout_r(expand(build_p7(4)), 0.5), SolverConfig{1e-9});
  ASSERT_TRUE(reduced.converged);
  ASSERT_TRUE(full.converged);
  EXPECT_NEAR(reduced.minimizer[0], full.minimizer[0], 1e-6);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(reduced.minimizer[1], full.minimizer[i], 1e-6);
}

TEST(Minimize, L1ProducesSparseOrBayesSolutions) {
  const auto r5 = minimize(Criterion::l1(build_p5(), 0.01));
  ASSERT_TRUE(r5.converged);
  EXPECT_EQ(r5.method.rfind("proximal-gradient", 0), 0u);
  EXPECT_EQ(zero_one_error(build_p5(), r5.minimizer), 0.0);
  const auto r6 = minimize(Criterion::l1(build_p6(), 0.01));
  ASSERT_TRUE(r6.converged);
  EXPECT_NEAR(zero_one_error(build_p6(), r6.minimizer), 1.0 / 7.0, 1e-15);
}

TEST(Minimize, RespectsInitialPointAndValidates) {
  SolverConfig cfg;
  cfg.initial_point = {1.0};
  EXPECT_THROW(minimize(Criterion::l2(build_p5(), 0.1), cfg), std::invalid_argument);
  SolverConfig bad;
  bad.tolerance = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  SolverConfig start;
  start.initial_point = {3.0, 3.0};
  const auto a = minimize(Criterion::l2(build_p5(), 0.1), start);
  const auto b = minimize(Criterion::l2(build_p5(), 0.1));
  EXPECT_NEAR(a.minimizer[0], b.minimizer[0], 1e-8);
}

TEST(FiniteDifference, MatchesAnalytic) {
  const auto c = Criterion::l2(build_p5(), 1.0 / 50);
  for (auto w : {Vector{0.3, -0.2}, Vector{2.0, 1.0}}) {
    const auto g = criterion_gradient(c, w);
    const auto fd = finite_difference_gradient(c, w);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(fd[i], g[i], 1e-6 * std::max(1.0, std::abs(g[i])));
  }
}

TEST(GradientSignScan, HalfspaceLemmaRay) {
  std::vector<double> grid;
  for (double a = 0.1; a <= 5.0 + 1e-12; a += 0.1) grid.push_back(a);
  const auto scan = gradient_sign_scan(Criterion::dropout_r(build_p5(), 1.0 / 3.0), Ray{{0.0, 0.0}, {1.0, 10.0 / 11.0}}, grid);
  ASSERT_EQ(scan.size(), grid.size());
  for (const auto& s : scan) EXPECT_GT(s.gradient[1], 0.0) << "a=" << s.param;
}

TEST(GradientSignScan, DiagonalRayOnManyFeatureSource) {
  const auto c = Criterion::reduced_dropout(build_p7(4), 0.5);
  std::vector<double> grid;
  for (double a = 0.05; a <= 4.0; a += 0.05) grid.push_back(a);
  const auto scan = gradient_sign_scan(c, Ray{{0.0, 0.0}, {1.0, 1.0}}, grid);
  // Along the diagonal the w1 partial stays negative past the point where the
  // w2 partial has turned positive.
  const auto at = gradient_sign_scan(c, Ray{{0.0, 0.0}, {1.0, 1.0}}, {2.0 * std::log(2.0)});
  EXPECT_LT(at[0].gradient[0], 0.0);
  EXPECT_GT(at[0].gradient[1], 0.0);
  double first_w1_cross = -1.0;
  double first_w2_cross = -1.0;
  for (const auto& s : scan) {
    if (first_w1_cross < 0 && s.gradient[0] >= 0) first_w1_cross = s.param;
    if (first_w2_cross < 0 && s.gradient[1] >= 0) first_w2_cross = s.param;
  }
  ASSERT_GT(first_w2_cross, 0.0);
  EXPECT_TRUE(first_w1_cross < 0 || first_w1_cross > first_w2_cross);
}

TEST(GradientSignScan, ThroughMinimizer) {
  const auto c = Criterion::l2(build_p6(), 0.05);
  const auto r = minimize(c);
  const auto scan = gradient_sign_scan(c, Ray{r.minimizer, {1.0, 0.0}}, {0.0});
  EXPECT_LE(std::max(std::abs(scan[0].gradient[0]), std::abs(scan[0].gradient[1])), 1e-9);
}

TEST(GradientSignScan, SymmetricPointHasEqualTailPartials) {
  const auto c = Criterion::dropout_r(expand(build_p7(4)), 0.5);
  const auto g = criterion_gradient(c, {0.7, 0.3, 0.3, 0.3});
  EXPECT_NEAR(g[1], g[2], 1e-14);
  EXPECT_NEAR(g[2], g[3], 1e-14);
}
