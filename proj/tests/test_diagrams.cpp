#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wicklab/diagram_json.hpp"
#include "wicklab/diagrams.hpp"

using namespace wicklab;

namespace {

WickMomentSpec constant_spec(std::size_t n, std::vector<unsigned> powers) {
  std::vector<WickMomentSpec::Factor> fs;
  for (unsigned p : powers) fs.push_back({GridFunction::constant(n, 1.0), p});
  return WickMomentSpec(std::move(fs));
}

WickMomentSpec random_wick_spec(rng::Stream& s, std::size_t max_n, unsigned max_K) {
  const std::size_t n = s.next_int(1, max_n);
  const unsigned nf = static_cast<unsigned>(s.next_int(1, 4));
  std::vector<WickMomentSpec::Factor> fs;
  unsigned room = max_K;
  for (unsigned i = 0; i < nf; ++i) {
    const unsigned reserve = nf - i - 1;
    const unsigned p = static_cast<unsigned>(s.next_int(1, std::min(4u, room - reserve)));
    room -= p;
    fs.push_back({oracle::random_grid(n, s), p});
  }
  return WickMomentSpec(std::move(fs));
}

}  // namespace

TEST(WickMoments, Examples) {
  const auto s31 = constant_spec(2, {3, 1});
  EXPECT_NEAR(wick_moment_closed(s31), -1.0, 1e-14);
  const auto r31 = wick_moment_traversal(s31);
  EXPECT_NEAR(r31.total, -1.0, 1e-14);
  EXPECT_EQ(r31.terms.size(), 6u);
  EXPECT_NEAR(wick_moment_oracle(s31), -1.0, 1e-14);

  const auto s22 = constant_spec(2, {2, 2});
  EXPECT_NEAR(wick_moment_closed(s22), 1.0, 1e-14);
  const auto r22 = wick_moment_traversal(s22);
  EXPECT_EQ(r22.terms.size(), 8u);
  EXPECT_EQ(r22.diagram_count, 8u);
  EXPECT_NEAR(r22.total, 1.0, 1e-14);
  EXPECT_NEAR(wick_moment_oracle(s22), 1.0, 1e-14);
}

TEST(WickMoments, FirstOrderIsSecondMoment) {
  rng::Stream s(4, 4);
  for (int i = 0; i < 10; ++i) {
    const std::size_t n = s.next_int(1, 9);
    const auto f = oracle::random_grid(n, s), g = oracle::random_grid(n, s);
    const WickMomentSpec spec({{f, 1}, {g, 1}});
    EXPECT_NEAR(wick_moment_closed(spec), riemann_inner_product(f, g), 1e-14);
    EXPECT_NEAR(wick_moment_closed(spec), moment_bruteforce(MomentSpec({{f, 1}, {g, 1}})), 1e-13);
  }
}

TEST(WickMoments, VanishingCases) {
  const auto f = sample(parse_expr("exp(x)"), 6);
  for (unsigned p = 1; p <= 6; ++p) {
    EXPECT_EQ(wick_moment_closed(WickMomentSpec({{f, p}})), 0.0);
    EXPECT_EQ(wick_moment_traversal(WickMomentSpec({{f, p}})).total, 0.0);
  }
  EXPECT_EQ(wick_moment_closed(WickMomentSpec({{f, 2}, {f, 1}})), 0.0);
  EXPECT_EQ(wick_moment_traversal(WickMomentSpec({{f, 2}, {f, 3}})).total, 0.0);
}

TEST(WickMoments, ThreeEnginesAgreeRandomized) {
  rng::Stream s(31337, 0);
  for (int i = 0; i < 150; ++i) {
    const auto spec = random_wick_spec(s, 10, 8);
    const double closed = wick_moment_closed(spec);
    const auto trav = wick_moment_traversal(spec, false);
    const double oracle_value = wick_moment_oracle(spec);
    double scale = 1.0;
    // magnitude of the traversal terms bounds the cancellation
    const auto full = wick_moment_traversal(spec, true);
    for (const auto& t : full.terms) scale += std::fabs(t.value);
    EXPECT_NEAR(trav.total, closed, 1e-12 * scale) << "case " << i;
    EXPECT_NEAR(oracle_value, closed, 1e-10 * scale) << "case " << i;
    EXPECT_EQ(trav.total, full.total);
  }
}

TEST(WickMoments, SignSumsCollapseToBlockCoefficients) {
  const auto f = sample(parse_expr("x"), 3), g = sample(parse_expr("1 - x"), 3);
  const auto r = wick_moment_traversal(WickMomentSpec({{f, 3}, {g, 3}}));
  const auto sums = traversal_sign_sums(r.terms);
  ASSERT_FALSE(sums.empty());
  for (const auto& [key, sum] : sums) EXPECT_EQ(Rational(sum), block_coefficient(std::popcount(key.second)));
}

TEST(WickMoments, DiagramsSatisfyExclusion) {
  const WickMomentSpec spec = constant_spec(3, {2, 3, 1});
  const auto lab = spec.labeling();
  const auto r = wick_moment_traversal(spec);
  for (const auto& t : r.terms) {
    for (auto b : t.diagram.partition.blocks) {
      EXPECT_FALSE(lab.monochromatic(b));
      EXPECT_EQ(std::popcount(b) % 2, 0);
    }
    double prod = 1.0;
    for (double v : t.block_values) prod *= v;
    EXPECT_DOUBLE_EQ(prod, t.value);
  }
}

TEST(WickMoments, CapacityBudget) {
  EngineLimits lim;
  lim.max_diagrams = 5;
  EXPECT_THROW(wick_moment_traversal(constant_spec(2, {2, 2}), true, lim), CapacityError);
  lim = {};
  lim.max_vertices = 4;
  EXPECT_THROW(wick_moment_closed(constant_spec(2, {3, 3}), lim), CapacityError);
  lim = {};
  lim.oracle_max_n = 3;
  EXPECT_THROW(wick_moment_oracle(constant_spec(4, {1, 1}), lim), CapacityError);
}

TEST(Gaussian, PairingExamples) {
  const auto one = GridFunction::constant(7, 1.0);
  EXPECT_NEAR(gaussian_wick_moment(WickMomentSpec({{one, 2}, {one, 2}})), 2.0, 1e-14);
  EXPECT_NEAR(gaussian_wick_moment(WickMomentSpec({{one, 3}, {one, 3}})), 6.0, 1e-13);
  EXPECT_EQ(gaussian_wick_moment(WickMomentSpec({{one, 3}, {one, 2}})), 0.0);
  EXPECT_EQ(gaussian_wick_moment(WickMomentSpec({{one, 4}})), 0.0);
}

TEST(Gaussian, MatchesIsserlisOracle) {
  rng::Stream s(17, 2);
  for (int i = 0; i < 40; ++i) {
    const auto spec = random_wick_spec(s, 6, 8);
    const auto& fs = spec.factors();
    std::vector<unsigned> owner;
    for (unsigned j = 0; j < fs.size(); ++j)
      for (unsigned r = 0; r < fs[j].power; ++r) owner.push_back(j);
    const double want = oracle::isserlis(
        owner, [&](unsigned a, unsigned b) { return riemann_inner_product(fs[a].f, fs[b].f); }, true);
    EXPECT_NEAR(gaussian_wick_moment(spec), want, 1e-12 * (1 + std::fabs(want))) << i;
  }
}

TEST(Convergence, ErrorDecaysLikeOneOverN) {
  const std::vector<WickTemplateFactor> t{{parse_expr("x"), 2}, {parse_expr("cos(x)"), 2}};
  const std::vector<std::size_t> ns{8, 16, 32, 64};
  const auto rows = convergence_study(t, ns);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i - 1].abs_error / rows[i].abs_error;
    EXPECT_GT(ratio, 1.8);
    EXPECT_LT(ratio, 2.2);
  }
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(r.error_times_n, r.abs_error * r.n);
  EXPECT_THROW(convergence_study(t, std::vector<std::size_t>{16, 8}), std::invalid_argument);
}

TEST(Convergence, ConstantFunctionErrorIsExact) {
  // f = 1, (2,2): Bernoulli 2 - 2/n, Gaussian 2
  const std::vector<WickTemplateFactor> t{{parse_expr("1"), 2}, {parse_expr("1"), 2}};
  const std::vector<std::size_t> ns{4, 10, 100};
  for (const auto& r : convergence_study(t, ns)) {
    EXPECT_NEAR(r.bernoulli, 2.0 - 2.0 / r.n, 1e-13);
    EXPECT_NEAR(r.gaussian, 2.0, 1e-13);
    EXPECT_NEAR(r.error_times_n, 2.0, 1e-10);
  }
}

TEST(Convergence, QuadratureInnerProduct) {
  const std::vector<WickTemplateFactor> t{{parse_expr("x"), 1}, {parse_expr("x"), 1}};
  const std::vector<std::size_t> ns{1000};
  const auto rows = convergence_study(t, ns, GaussianInnerProduct::quadrature);
  EXPECT_NEAR(rows[0].gaussian, 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(rows[0].bernoulli, 1.0 / 3.0, 1e-3);
}

TEST(DiagramJson, Shape) {
  const auto r = wick_moment_traversal(constant_spec(2, {3, 1}));
  const auto j = traversal_result_json(r);
  EXPECT_DOUBLE_EQ(j["total"].get<double>(), -1.0);
  ASSERT_EQ(j["terms"].size(), 6u);
  const auto& t0 = j["terms"][0];
  EXPECT_EQ(t0["blocks"], nlohmann::json::parse("[[1,2,3,4]]"));
  EXPECT_EQ(t0["traversals"][0]["order"], nlohmann::json::parse("[1,2,3,4]"));
  EXPECT_EQ(t0["traversals"][0]["ascents"], 3);
  EXPECT_EQ(t0["traversals"][0]["sign"], 1);
  long sign_total = 0;
  for (const auto& t : j["terms"]) sign_total += t["traversals"][0]["sign"].get<long>();
  EXPECT_EQ(sign_total, -2);
}
