#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dropoutlab/serialize.hpp"

using namespace dropoutlab;

TEST(Numbers, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int t = 0; t < 1000; ++t) {
    const double v = u(rng) * std::pow(10.0, t % 40 - 20);
    EXPECT_EQ(parse_number(format_number(v)), v);
  }
  EXPECT_TRUE(std::isnan(parse_number("nan")));
  EXPECT_THROW(parse_number("1.5x"), std::invalid_argument);
}

TEST(Numbers, JsonInfinity) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(number_json(inf), Json("inf"));
  EXPECT_EQ(number_from_json(Json("inf")), inf);
  EXPECT_EQ(number_from_json(Json(0.25)), 0.25);
  EXPECT_DOUBLE_EQ(probability_from_json(Json("1/3")), 1.0 / 3.0);
}

TEST(Sources, RoundTrip) {
  const SourceVariant p5 = build_p5();
  const auto back = source_from_json(to_json(p5));
  const auto& d = std::get<DiscreteSource>(back);
  ASSERT_EQ(d.atoms().size(), 3u);
  EXPECT_EQ(d.atoms()[1].x, build_p5().atoms()[1].x);
  EXPECT_EQ(d.atoms()[2].prob, build_p5().atoms()[2].prob);

  const SourceVariant p8 = build_p8(20, 0.1, 0.5, 0.05);
  const auto back8 = std::get<ExchangeableSource>(source_from_json(to_json(p8)));
  EXPECT_EQ(back8.dimension(), 20u);
  EXPECT_TRUE(back8.label_symmetric());
  EXPECT_EQ(std::get<IndependentSigns>(back8.tail()).bias, 0.05);
}

TEST(Sources, Named) {
  EXPECT_EQ(std::get<DiscreteSource>(source_from_json(Json::parse(R"({"name":"p6"})"))).atoms().size(), 3u);
  EXPECT_EQ(std::get<ExchangeableSource>(source_from_json(Json::parse(R"({"name":"p7","n":8})"))).dimension(), 8u);
  EXPECT_THROW(source_from_json(Json::parse(R"({"name":"p9"})")), std::invalid_argument);
}

TEST(Criteria, SpecRoundTrip) {
  const SourceVariant src = build_p5();
  const auto c = criterion_from_json(Json::parse(R"({"kind":"dropout","q":"1/3"})"), src);
  EXPECT_EQ(c.kind(), CriterionKind::DropoutNu);
  EXPECT_DOUBLE_EQ(c.q(), 1.0 / 3.0);
  const auto again = criterion_from_json(criterion_spec_json(c), src);
  EXPECT_EQ(again.q(), c.q());
}

TEST(SolverConfig, RoundTrip) {
  SolverConfig cfg;
  cfg.tolerance = 1e-8;
  cfg.max_iterations = 77;
  cfg.initial_point = {1.0, 2.0};
  const auto back = solver_config_from_json(to_json(cfg));
  EXPECT_EQ(back.tolerance, 1e-8);
  EXPECT_EQ(back.max_iterations, 77u);
  EXPECT_EQ(back.initial_point, cfg.initial_point);
}

TEST(Csv, TableRoundTrip) {
  CsvTable t{{"a", "b"}, {{1.0, 0.1}, {-2.5e-300, std::numeric_limits<double>::infinity()}}};
  std::stringstream ss;
  write_csv(ss, t);
  EXPECT_EQ(ss.str(), "a,b\n1,0.1\n-2.5e-300,inf\n");
  const auto back = read_csv(ss);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Csv, GridRoundTrip) {
  const auto g = grid_scan([](double x, double y) { return std::sin(x) * std::exp(y); }, Window{-1, 2, 0, 1},
                           Resolution{7, 4});
  const auto table = grid_to_csv(g);
  EXPECT_EQ(table.header[0], "w2\\w1");
  std::stringstream ss;
  write_csv(ss, table);
  const auto back = grid_from_csv(read_csv(ss));
  EXPECT_EQ(back.xs, g.xs);
  EXPECT_EQ(back.ys, g.ys);
  EXPECT_EQ(back.values, g.values);
}

TEST(Reports, SeparationKeys) {
  SeparationReport r;
  r.experiment = "2d";
  r.regularizer = "l2";
  r.c_achieved = std::numeric_limits<double>::infinity();
  const auto j = to_json(r);
  EXPECT_TRUE(j.contains("er_dropout_P"));
  EXPECT_TRUE(j.contains("er_l2_Q"));
  EXPECT_EQ(j.at("C_achieved"), Json("inf"));
}

TEST(Reports, VerifySummary) {
  std::vector<TheoremCheckResult> rs{{"a", true, {}, 0.0}, {"b", false, {{"w", 1.5}}, 1e-9}};
  const auto j = verify_report_json(rs);
  EXPECT_EQ(j.at("total"), 2);
  EXPECT_EQ(j.at("passed"), 1);
  EXPECT_EQ(j.at("all_passed"), false);
  EXPECT_EQ(j.at("checks").size(), 2u);
}
