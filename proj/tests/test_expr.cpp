#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wicklab/error.hpp"
#include "wicklab/expr.hpp"

using wicklab::parse_expr;
using wicklab::ParseError;

TEST(Expr, ParsesExamples) {
  EXPECT_EQ(wicklab::to_sexpr(parse_expr("x")), "x");
  EXPECT_EQ(wicklab::to_sexpr(parse_expr("sin(x1)*x2 + 1", 2)), "Add(Mul(sin(x1),x2),1)");
  EXPECT_EQ(wicklab::to_sexpr(parse_expr("x ^ 2 - 0.5")), "Sub(Pow(x,2),0.5)");
}

TEST(Expr, ErrorOffsets) {
  try {
    parse_expr("x1 +", 2);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  try {
    parse_expr("2 * foo(x)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(parse_expr(""), ParseError);
  EXPECT_THROW(parse_expr("(x"), ParseError);
  EXPECT_THROW(parse_expr("x)"), ParseError);
  EXPECT_THROW(parse_expr("x ^ 1.5"), ParseError);
  EXPECT_THROW(parse_expr("x3", 2), ParseError);
  EXPECT_THROW(parse_expr("x", 2), ParseError);
  EXPECT_THROW(parse_expr("x0", 2), ParseError);
  EXPECT_THROW(parse_expr("1e999"), ParseError);
}

TEST(Expr, Precedence) {
  EXPECT_DOUBLE_EQ(parse_expr("2 + 3 * 4")(0.0), 14.0);
  EXPECT_DOUBLE_EQ(parse_expr("2 - 3 - 4")(0.0), -5.0);
  EXPECT_DOUBLE_EQ(parse_expr("8 / 4 / 2")(0.0), 1.0);
  EXPECT_DOUBLE_EQ(parse_expr("-2^2")(0.0), -4.0);
  EXPECT_DOUBLE_EQ(parse_expr("(-2)^2")(0.0), 4.0);
  EXPECT_DOUBLE_EQ(parse_expr("2*x^3")(0.5), 0.25);
  EXPECT_DOUBLE_EQ(parse_expr("x^0")(0.0), 1.0);
}

TEST(Expr, Functions) {
  const double x = 0.3;
  EXPECT_DOUBLE_EQ(parse_expr("sin(x)")(x), std::sin(x));
  EXPECT_DOUBLE_EQ(parse_expr("cos(x)")(x), std::cos(x));
  EXPECT_DOUBLE_EQ(parse_expr("exp(x)")(x), std::exp(x));
  EXPECT_DOUBLE_EQ(parse_expr("sqrt(x)")(x), std::sqrt(x));
  EXPECT_DOUBLE_EQ(parse_expr("abs(x - 1)")(x), 0.7);
  EXPECT_DOUBLE_EQ(parse_expr("pi")(x), M_PI);
  EXPECT_DOUBLE_EQ(parse_expr("1.5e-1 + 2E1")(x), 20.15);
}

TEST(Expr, MultivariateEvaluation) {
  const auto e = parse_expr("x1*x2 - x3", 3);
  const double pt[] = {2.0, 3.0, 1.0};
  EXPECT_DOUBLE_EQ(e(pt), 5.0);
}

TEST(Expr, PrintParseRoundTrip) {
  wicklab::rng::Stream s(42, 0);
  for (int i = 0; i < 300; ++i) {
    const unsigned arity = static_cast<unsigned>(s.next_int(1, 3));
    const auto src = oracle::random_expr_source(s, arity, 4);
    const auto e = parse_expr(src, arity);
    const auto printed = wicklab::to_string(e);
    const auto again = parse_expr(printed, arity);
    EXPECT_EQ(e, again) << src << " -> " << printed;
    EXPECT_EQ(wicklab::to_string(again), printed);
  }
}

TEST(Expr, WhitespaceInsensitive) {
  EXPECT_EQ(parse_expr("sin( x )*2+1"), parse_expr("  sin(x) * 2 + 1 "));
}
