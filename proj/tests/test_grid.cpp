#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "wicklab/grid.hpp"

using wicklab::GridFunction;
using wicklab::parse_expr;
using wicklab::sample;

TEST(Grid, SampleExamples) {
  EXPECT_EQ(sample(parse_expr("x"), 2).values()[0], 0.5);
  EXPECT_EQ(sample(parse_expr("x"), 2).values()[1], 1.0);
  const auto one = sample(parse_expr("1"), 3);
  for (double v : one.values()) EXPECT_EQ(v, 1.0);
  const auto sq = sample(parse_expr("x^2"), 4);
  const double want[] = {0.0625, 0.25, 0.5625, 1.0};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(sq.values()[i], want[i]);
}

TEST(Grid, RowMajorMultivariate) {
  const auto g = sample(parse_expr("10*x1 + x2", 2), 2);
  // (1/2,1/2), (1/2,1), (1,1/2), (1,1)
  EXPECT_DOUBLE_EQ(g[0], 5.5);
  EXPECT_DOUBLE_EQ(g[1], 6.0);
  EXPECT_DOUBLE_EQ(g[2], 10.5);
  EXPECT_DOUBLE_EQ(g[3], 11.0);
}

TEST(Grid, NonFiniteReported) {
  EXPECT_THROW(sample(parse_expr("1/(x - 0.5)"), 2), wicklab::NumericError);
  EXPECT_THROW(GridFunction::from_values(2, 1, {1.0}), std::invalid_argument);
}

TEST(Grid, SampleIsDeterministic) {
  const auto e = parse_expr("sin(3*x) + exp(x)");
  EXPECT_EQ(sample(e, 97), sample(e, 97));
}

TEST(Grid, WeightedSumExamples) {
  const auto one5 = GridFunction::constant(5, 1.0);
  EXPECT_DOUBLE_EQ(wicklab::weighted_grid_sum({&one5, &one5}), 1.0);
  const auto one2 = GridFunction::constant(2, 1.0);
  EXPECT_DOUBLE_EQ(wicklab::weighted_grid_sum({&one2, &one2, &one2, &one2}), 0.5);
  const auto one4 = GridFunction::constant(4, 1.0);
  EXPECT_DOUBLE_EQ(wicklab::weighted_grid_sum({&one4}), 2.0);
  const auto one3 = GridFunction::constant(3, 1.0);
  EXPECT_THROW(wicklab::weighted_grid_sum({&one2, &one3}), std::invalid_argument);
}

TEST(Grid, RiemannExamples) {
  const auto one = GridFunction::constant(10, 1.0);
  EXPECT_DOUBLE_EQ(wicklab::riemann_inner_product(one, one), 1.0);
  EXPECT_DOUBLE_EQ(wicklab::riemann_inner_product(sample(parse_expr("x"), 2), GridFunction::constant(2, 1.0)),
                   0.75);
  const auto x = sample(parse_expr("x"), 4000);
  EXPECT_NEAR(wicklab::riemann_inner_product(x, x), 1.0 / 3.0, 1.0 / 4000);
}

TEST(Grid, PairSumEqualsRiemannBitwise) {
  wicklab::rng::Stream s(7, 0);
  for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 1000u}) {
    const auto f = oracle::random_grid(n, s), g = oracle::random_grid(n, s);
    EXPECT_EQ(wicklab::weighted_grid_sum({&f, &g}), wicklab::riemann_inner_product(f, g)) << n;
  }
}

TEST(Grid, QuadratureInnerProduct) {
  EXPECT_NEAR(wicklab::quadrature_inner_product(parse_expr("x"), parse_expr("x")), 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(wicklab::quadrature_inner_product(parse_expr("sqrt(2)*cos(pi*x)"),
                                                parse_expr("sqrt(2)*cos(pi*x)")),
              1.0, 1e-12);
}

TEST(Grid, CsvRoundTrip) {
  const auto g = sample(parse_expr("sin(x1)*x2", 2), 5);
  std::stringstream ss;
  wicklab::write_csv(ss, g);
  EXPECT_EQ(ss.str().substr(0, 12), "n,arity\n5,2\n");
  EXPECT_EQ(wicklab::read_grid_csv(ss), g);
  std::stringstream bare("3,1\n1\n2\n3\n");
  EXPECT_EQ(wicklab::read_grid_csv(bare), GridFunction::from_values(3, 1, {1, 2, 3}));
  std::stringstream shortcsv("n,arity\n3,1\n1\n2\n");
  EXPECT_THROW(wicklab::read_grid_csv(shortcsv), std::invalid_argument);
}
