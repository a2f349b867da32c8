#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = wicklab::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

}  // namespace

TEST(CliParsing, FactorArguments) {
  const auto [e, p] = wicklab::cli::parse_factor_arg("sin(x):3");
  EXPECT_EQ(e, "sin(x)");
  EXPECT_EQ(p, 3u);
  EXPECT_EQ(wicklab::cli::parse_factor_arg("x").power, 1u);
  EXPECT_THROW(wicklab::cli::parse_factor_arg("x:0"), wicklab::ParseError);
  EXPECT_THROW(wicklab::cli::parse_factor_arg("x:two"), wicklab::ParseError);
  EXPECT_EQ(wicklab::cli::parse_size_list("8,16,32"), (std::vector<std::size_t>{8, 16, 32}));
  EXPECT_THROW(wicklab::cli::parse_size_list("8,,16"), wicklab::ParseError);
  const auto [idx, c] = wicklab::cli::parse_coeff_arg("1,2=0.5");
  EXPECT_EQ(idx, (std::vector<unsigned>{1, 2}));
  EXPECT_EQ(c, 0.5);
  EXPECT_THROW(wicklab::cli::parse_coeff_arg("1,2"), wicklab::ParseError);
}

TEST(Cli, MomentsJson) {
  const auto r = run({"moments", "--n", "4", "--factor", "1:2", "--engine", "all", "--samples", "2000"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["command"], "moments");
  EXPECT_NEAR(j["results"]["formula"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(j["results"]["oracle"].get<double>(), 1.0, 1e-15);
  EXPECT_TRUE(j["results"].contains("montecarlo"));
  EXPECT_FALSE(j.contains("timings_ms"));
}

TEST(Cli, MomentsCsv) {
  const auto r = run({"moments", "--n", "2", "--factor", "1:4", "--engine", "oracle", "--format", "csv"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "engine,value,std_error");
  const auto row = r.out.substr(r.out.find('\n') + 1);
  ASSERT_EQ(row.substr(0, 7), "oracle,");
  EXPECT_NEAR(std::stod(row.substr(7)), 2.0, 1e-14);
}

TEST(Cli, WickAllEngines) {
  const auto r = run({"wick", "--n", "2", "--wick", "1:2", "--wick", "1:2", "--engine", "all"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["results"]["closed"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["results"]["traversal"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["results"]["oracle"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["results"]["gaussian"].get<double>(), 2.0, 1e-14);
  EXPECT_EQ(j["polynomials"][0]["coeffs"], json::parse("[-1.0, 0.0, 1.0]"));
}

TEST(Cli, DiagramsDump) {
  const auto r = run({"diagrams", "--n", "2", "--wick", "1:3", "--wick", "1:1"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["terms"].size(), 6u);
  EXPECT_EQ(j["labeling"], json::parse("[1,1,1,2]"));
  EXPECT_NEAR(j["total"].get<double>(), -1.0, 1e-14);
  EXPECT_NEAR(j["closed"].get<double>(), -1.0, 1e-14);

  const auto r22 = run({"diagrams", "--n", "2", "--wick", "1:2", "--wick", "1:2"});
  EXPECT_EQ(json::parse(r22.out)["terms"].size(), 8u);

  const auto csv = run({"diagrams", "--n", "2", "--wick", "1:3", "--wick", "1:1", "--format", "csv"});
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "term,blocks,orders,signs,value");
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 7);
}

TEST(Cli, ConvergeCsvHeader) {
  const auto r = run({"converge", "--wick", "x:2", "--wick", "cos(x):2", "--grid", "8,16,32,64"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,bernoulli,gaussian,abs_error,error_times_n");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(run({"converge", "--wick", "x:2", "--grid", "16,8"}).status, 2);
}

TEST(Cli, HermiteRows) {
  const auto r = run({"hermite", "--coeff", "1,2=1", "--coeff", "2,1=1", "--basis-size", "2", "--grid", "4,8",
                      "--quadrature-gram"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["config"]["arity"], 2);
}

TEST(Cli, SampleSummaries) {
  const auto one = run({"sample", "--n", "64", "--expr", "x", "--samples", "3000", "--seed", "4"});
  ASSERT_EQ(one.status, 0) << one.err;
  EXPECT_TRUE(json::parse(one.out)["summary"].contains("mean"));
  const auto two = run({"sample", "--n", "64", "--expr", "x", "--expr", "1", "--samples", "500"});
  ASSERT_EQ(two.status, 0) << two.err;
  EXPECT_TRUE(json::parse(two.out)["summary"].contains("target_covariance"));
  const auto csv = run({"sample", "--n", "8", "--expr", "x", "--samples", "10", "--format", "csv"});
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 11);
}

TEST(Cli, ByteIdenticalAcrossRunsAndThreads) {
  const std::vector<std::string> base{"moments", "--n", "40", "--factor", "exp(x):3", "--factor", "x:1",
                                      "--engine", "mc", "--samples", "20000", "--seed", "9"};
  auto with_threads = [&](const char* t) {
    auto a = base;
    a.push_back("--threads");
    a.push_back(t);
    return run(a).out;
  };
  const auto a = with_threads("1");
  EXPECT_EQ(a, with_threads("1"));
  EXPECT_EQ(a, with_threads("3"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"bogus"}).status, 2);
  EXPECT_EQ(run({"moments", "--factor", "sin(:2"}).status, 2);
  EXPECT_EQ(run({"moments", "--factor", "1:2", "--format", "xml"}).status, 2);
  EXPECT_EQ(run({"moments", "--n", "30", "--factor", "1:2", "--engine", "oracle"}).status, 3);
  EXPECT_EQ(run({"wick", "--wick", "1:10", "--wick", "1:10", "--max-vertices", "16"}).status, 3);
  const auto io = run({"moments", "--factor", "1:2", "--out", "/nonexistent-dir/x.json"});
  EXPECT_EQ(io.status, 4);
  EXPECT_FALSE(io.err.empty());
}

TEST(Cli, WritesOutFile) {
  const std::string path = ::testing::TempDir() + "wicklab_cli_out.json";
  const auto r = run({"wick", "--n", "3", "--wick", "x:1", "--wick", "x:1", "--out", path});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto j = json::parse(in);
  EXPECT_NEAR(j["results"]["closed"].get<double>(), (1.0 / 9 + 4.0 / 9 + 1.0) / 3, 1e-15);
  std::remove(path.c_str());
}

TEST(Cli, GridFileFactors) {
  const std::string path = ::testing::TempDir() + "wicklab_cli_grid.csv";
  {
    std::ofstream f(path);
    f << "n,arity\n2,1\n1\n1\n";
  }
  const auto r = run({"wick", "--n", "2", "--wick", "@" + path + ":3", "--wick", "1:1"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["results"]["closed"].get<double>(), -1.0, 1e-14);
  EXPECT_EQ(run({"wick", "--n", "3", "--wick", "@" + path + ":2"}).status, 2);
  EXPECT_EQ(run({"wick", "--n", "2", "--wick", "@/nonexistent-dir/g.csv:2"}).status, 4);
  std::remove(path.c_str());
}

TEST(Cli, Help) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("diagrams"), std::string::npos);
}
