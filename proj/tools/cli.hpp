#ifndef WICKLAB_TOOLS_CLI_HPP
#define WICKLAB_TOOLS_CLI_HPP

// wicklab command line: subcommands moments, wick, diagrams, converge,
// hermite, sample, verify. run() is separate from main() so tests can drive it.
//
// exit codes: 0 ok, 1 verify failure or numeric failure, 2 parse/usage,
// 3 capacity, 4 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wicklab/acceptance.hpp"
#include "wicklab/diagram_json.hpp"
#include "wicklab/wicklab.hpp"

namespace wicklab::cli {

using nlohmann::json;

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FactorArg {
  std::string text;
  unsigned power = 1;
};

/// "expr:power" (split at the last ':'); a missing power means 1.
inline FactorArg parse_factor_arg(const std::string& arg) {
  const auto colon = arg.rfind(':');
  if (colon == std::string::npos) return {arg, 1};
  const std::string p = arg.substr(colon + 1);
  if (p.empty() || p.size() > 3 || !std::all_of(p.begin(), p.end(), ::isdigit))
    throw ParseError(colon + 1, "power after ':' must be a positive integer in '" + arg + "'");
  const unsigned power = static_cast<unsigned>(std::stoul(p));
  if (power == 0) throw ParseError(colon + 1, "power must be positive in '" + arg + "'");
  return {arg.substr(0, colon), power};
}

/// "8,16,32" -> {8, 16, 32}.
inline std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    if (item.empty() || !std::all_of(item.begin(), item.end(), ::isdigit) || item.size() > 9)
      throw ParseError(pos, "expected a positive integer in list '" + text + "'");
    const auto v = static_cast<std::size_t>(std::stoul(item));
    if (v == 0) throw ParseError(pos, "grid sizes must be positive");
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

/// "1,2=0.5" -> ({1, 2}, 0.5).
inline std::pair<std::vector<unsigned>, double> parse_coeff_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) throw ParseError(0, "coefficient must look like 'm1,m2=c'");
  std::vector<unsigned> idx;
  for (std::size_t v : parse_size_list(arg.substr(0, eq))) idx.push_back(static_cast<unsigned>(v));
  const std::string value = arg.substr(eq + 1);
  std::size_t used = 0;
  double c = 0.0;
  try {
    c = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(c))
    throw ParseError(eq + 1, "bad coefficient value in '" + arg + "'");
  return {idx, c};
}

struct Options {
  std::size_t n = 8;
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  std::string out;
  std::string format;
  unsigned threads = 0;
  bool timings = false;
  std::string engine;
  std::string grid;
  std::string inner = "same-grid";
  std::vector<std::string> factors;
  std::vector<std::string> wick;
  std::vector<std::string> exprs;
  std::vector<std::string> coeffs;
  unsigned basis_size = 0;
  unsigned exact_max_n = 16;
  std::size_t gram_n = 4096;
  bool quadrature_gram = false;
  std::optional<std::uint64_t> verify_seed;
  EngineLimits limits;
};

class Timer {
 public:
  explicit Timer(bool enabled) : enabled_(enabled) {}
  template <class Fn>
  auto time(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = fn();
    if (enabled_)
      ms_[name] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    return r;
  }
  void attach(json& j) const {
    if (enabled_) j["timings_ms"] = ms_;
  }

 private:
  bool enabled_;
  std::map<std::string, double> ms_;
};

inline std::string num(double v) { return detail::format_number(v); }

inline json echo_factors(const std::vector<FactorArg>& fs) {
  json a = json::array();
  for (const auto& f : fs) a.push_back({{"expr", f.text}, {"power", f.power}});
  return a;
}

/// "@path" factors: a univariate grid CSV whose n must match --n.
inline GridFunction load_grid(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file '" + path + "'");
  GridFunction g = read_grid_csv(in);
  if (g.arity() != 1) throw UsageError("grid file '" + path + "' must be univariate");
  if (g.n() != n)
    throw UsageError("grid file '" + path + "' has n = " + std::to_string(g.n()) + " but --n is " +
                     std::to_string(n));
  return g;
}

template <class Spec>
Spec build_spec(const std::vector<std::string>& args, std::size_t n, std::vector<FactorArg>& parsed) {
  if (args.empty()) throw UsageError("at least one factor is required");
  std::vector<typename Spec::Factor> factors;
  for (const auto& a : args) {
    parsed.push_back(parse_factor_arg(a));
    const std::string& text = parsed.back().text;
    factors.push_back({text.starts_with('@') ? load_grid(text.substr(1), n) : sample(parse_expr(text), n),
                       parsed.back().power});
  }
  return Spec(std::move(factors));
}

inline std::string finish_json(json& j, const Timer& timer) {
  timer.attach(j);
  return j.dump(2) + "\n";
}

inline void require_format(const std::string& fmt, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (fmt == a) return;
  throw UsageError("unsupported --format '" + fmt + "' for this command");
}

inline std::string cmd_moments(Options& o) {
  const std::string fmt = o.format.empty() ? "json" : o.format;
  require_format(fmt, {"json", "csv"});
  const std::string engine = o.engine.empty() ? "formula" : o.engine;
  if (engine != "formula" && engine != "oracle" && engine != "mc" && engine != "all")
    throw UsageError("--engine must be formula, oracle, mc or all");
  std::vector<FactorArg> parsed;
  const auto spec = build_spec<MomentSpec>(o.factors, o.n, parsed);
  Timer timer(o.timings);
  json j;
  j["command"] = "moments";
  j["config"] = {{"n", o.n}, {"factors", echo_factors(parsed)}, {"engine", engine}};
  json& res = j["results"];
  std::optional<double> formula, oracle;
  std::optional<McEstimate> mc;
  if (engine == "formula" || engine == "all")
    formula = timer.time("formula", [&] { return moment_partition_formula(spec, o.limits); });
  if (engine == "oracle" || engine == "all")
    oracle = timer.time("oracle", [&] { return moment_bruteforce(spec, o.limits); });
  if (engine == "mc" || engine == "all") {
    j["config"]["seed"] = o.seed;
    j["config"]["samples"] = o.samples;
    mc = timer.time("montecarlo", [&] {
      return moment_montecarlo(spec, McConfig{o.samples, o.seed}, o.limits.workers);
    });
  }
  if (formula) res["formula"] = *formula;
  if (oracle) res["oracle"] = *oracle;
  if (mc) res["montecarlo"] = {{"estimate", mc->estimate}, {"std_error", mc->std_error}};
  if (formula && oracle)
    j["checks"]["formula_minus_oracle"] = *formula - *oracle;
  if (mc && (oracle || formula)) {
    const double exact = oracle ? *oracle : *formula;
    j["checks"]["montecarlo_z"] = mc->std_error > 0.0 ? (mc->estimate - exact) / mc->std_error : 0.0;
  }
  if (fmt == "csv") {
    std::string s = "engine,value,std_error\n";
    if (formula) s += "formula," + num(*formula) + ",0\n";
    if (oracle) s += "oracle," + num(*oracle) + ",0\n";
    if (mc) s += "montecarlo," + num(mc->estimate) + "," + num(mc->std_error) + "\n";
    return s;
  }
  return finish_json(j, timer);
}

inline std::string cmd_wick(Options& o) {
  const std::string fmt = o.format.empty() ? "json" : o.format;
  require_format(fmt, {"json", "csv"});
  const std::string engine = o.engine.empty() ? "closed" : o.engine;
  static const std::vector<std::string> engines{"closed", "traversal", "oracle", "gaussian"};
  if (engine != "all" && std::find(engines.begin(), engines.end(), engine) == engines.end())
    throw UsageError("--engine must be closed, traversal, oracle, gaussian or all");
  std::vector<FactorArg> parsed;
  const auto spec = build_spec<WickMomentSpec>(o.wick, o.n, parsed);
  Timer timer(o.timings);
  json j;
  j["command"] = "wick";
  j["config"] = {{"n", o.n}, {"wick", echo_factors(parsed)}, {"engine", engine}};
  std::vector<std::pair<std::string, double>> values;
  for (const auto& e : engines) {
    if (engine != "all" && engine != e) continue;
    double v = 0.0;
    if (e == "closed") v = timer.time(e, [&] { return wick_moment_closed(spec, o.limits); });
    if (e == "traversal")
      v = timer.time(e, [&] { return wick_moment_traversal(spec, false, o.limits).total; });
    if (e == "oracle") v = timer.time(e, [&] { return wick_moment_oracle(spec, o.limits); });
    if (e == "gaussian") v = timer.time(e, [&] { return gaussian_wick_moment(spec, o.limits); });
    values.emplace_back(e, v);
    j["results"][e] = v;
  }
  json polys = json::array();
  for (std::size_t i = 0; i < spec.factors().size(); ++i) {
    const auto& fac = spec.factors()[i];
    const auto p = wick_power_of_noise(fac.f, fac.power, MomentEngine::partition_formula, o.limits);
    polys.push_back({{"expr", parsed[i].text}, {"power", fac.power}, {"coeffs", p.coeffs}});
  }
  j["polynomials"] = polys;
  if (fmt == "csv") {
    std::string s = "engine,value\n";
    for (const auto& [e, v] : values) s += e + "," + num(v) + "\n";
    return s;
  }
  return finish_json(j, timer);
}

inline std::string block_list(const std::vector<std::vector<unsigned>>& sets) {
  std::string s;
  for (std::size_t b = 0; b < sets.size(); ++b) {
    if (b) s += '|';
    for (std::size_t i = 0; i < sets[b].size(); ++i) s += (i ? " " : "") + std::to_string(sets[b][i]);
  }
  return s;
}

inline std::string cmd_diagrams(Options& o) {
  const std::string fmt = o.format.empty() ? "json" : o.format;
  require_format(fmt, {"json", "csv"});
  std::vector<FactorArg> parsed;
  const auto spec = build_spec<WickMomentSpec>(o.wick, o.n, parsed);
  Timer timer(o.timings);
  const auto r = timer.time("traversal", [&] { return wick_moment_traversal(spec, true, o.limits); });
  const double closed = timer.time("closed", [&] { return wick_moment_closed(spec, o.limits); });
  if (fmt == "csv") {
    std::string s = "term,blocks,orders,signs,value\n";
    for (std::size_t t = 0; t < r.terms.size(); ++t) {
      const auto& term = r.terms[t];
      std::vector<std::vector<unsigned>> orders;
      std::string signs;
      for (const auto& tr : term.diagram.traversals) {
        orders.push_back(tr.order);
        signs += (signs.empty() ? "" : " ") + std::to_string(tr.sign());
      }
      s += std::to_string(t + 1) + "," + block_list(term.diagram.partition.vertex_sets()) + "," +
           block_list(orders) + "," + signs + "," + num(term.value) + "\n";
    }
    return s;
  }
  json j;
  j["command"] = "diagrams";
  j["config"] = {{"n", o.n}, {"wick", echo_factors(parsed)}};
  j["labeling"] = spec.vertex_factors();
  for (auto& v : j["labeling"]) v = v.get<std::size_t>() + 1;
  j["closed"] = closed;
  j.update(traversal_result_json(r));
  return finish_json(j, timer);
}

inline std::string cmd_converge(Options& o) {
  const std::string fmt = o.format.empty() ? "csv" : o.format;
  require_format(fmt, {"json", "csv"});
  if (o.wick.empty()) throw UsageError("converge needs at least one --wick factor");
  if (o.grid.empty()) throw UsageError("converge needs --grid");
  const auto ns = parse_size_list(o.grid);
  GaussianInnerProduct inner;
  if (o.inner == "same-grid")
    inner = GaussianInnerProduct::same_grid;
  else if (o.inner == "quadrature")
    inner = GaussianInnerProduct::quadrature;
  else
    throw UsageError("--inner must be same-grid or quadrature");
  std::vector<FactorArg> parsed;
  std::vector<WickTemplateFactor> tmpl;
  for (const auto& a : o.wick) {
    parsed.push_back(parse_factor_arg(a));
    tmpl.push_back({parse_expr(parsed.back().text), parsed.back().power});
  }
  Timer timer(o.timings);
  const auto rows = timer.time("study", [&] { return convergence_study(tmpl, ns, inner, o.limits); });
  if (fmt == "csv") {
    std::string s = "n,bernoulli,gaussian,abs_error,error_times_n\n";
    for (const auto& r : rows)
      s += std::to_string(r.n) + "," + num(r.bernoulli) + "," + num(r.gaussian) + "," +
           num(r.abs_error) + "," + num(r.error_times_n) + "\n";
    return s;
  }
  json j;
  j["command"] = "converge";
  j["config"] = {{"wick", echo_factors(parsed)}, {"grid", ns}, {"inner", o.inner}};
  json& out = j["rows"] = json::array();
  for (const auto& r : rows)
    out.push_back({{"n", r.n},
                   {"bernoulli", r.bernoulli},
                   {"gaussian", r.gaussian},
                   {"abs_error", r.abs_error},
                   {"error_times_n", r.error_times_n}});
  return finish_json(j, timer);
}

inline std::string cmd_hermite(Options& o) {
  const std::string fmt = o.format.empty() ? "json" : o.format;
  require_format(fmt, {"json", "csv"});
  if (o.coeffs.empty()) throw UsageError("hermite needs at least one --coeff m1,..,mk=c");
  MultiIndexCoeffs c;
  unsigned max_index = 0;
  for (std::size_t i = 0; i < o.coeffs.size(); ++i) {
    auto [idx, value] = parse_coeff_arg(o.coeffs[i]);
    if (i == 0) c.arity = static_cast<unsigned>(idx.size());
    if (idx.size() != c.arity) throw UsageError("all --coeff entries need the same arity");
    for (unsigned m : idx) max_index = std::max(max_index, m);
    c.coeffs[idx] += value;
  }
  const unsigned M = o.basis_size == 0 ? max_index : o.basis_size;
  if (M < max_index) throw UsageError("--basis-size smaller than the largest coefficient index");
  c.basis = cosine_basis(M);
  const auto ns = parse_size_list(o.grid.empty() ? "16,32,64,128,256" : o.grid);
  KFormLimitOptions kopt;
  kopt.exact_max_n = o.exact_max_n;
  kopt.gram_n = o.gram_n;
  kopt.quadrature_gram = o.quadrature_gram;
  Timer timer(o.timings);
  const auto rows = timer.time("limit_check", [&] {
    return kform_limit_check(c, ns, McConfig{o.samples, o.seed}, kopt, o.limits);
  });
  if (fmt == "csv") {
    std::string s =
        "n,exact,mean,mean_se,second,second_se,third,third_se,second_exact,limit_second,"
        "limit_third,gap_second,gap_third\n";
    for (const auto& r : rows)
      s += std::to_string(r.n) + "," + (r.exact ? "1" : "0") + "," + num(r.mean) + "," +
           num(r.mean_se) + "," + num(r.second) + "," + num(r.second_se) + "," + num(r.third) +
           "," + num(r.third_se) + "," + num(r.second_exact) + "," + num(r.limit_second) + "," +
           num(r.limit_third) + "," + num(r.gap_second) + "," + num(r.gap_third) + "\n";
    return s;
  }
  json j;
  j["command"] = "hermite";
  json cs = json::array();
  for (const auto& [idx, v] : c.coeffs) cs.push_back({{"index", idx}, {"value", v}});
  j["config"] = {{"arity", c.arity}, {"basis_size", M},  {"coeffs", cs},
                 {"grid", ns},       {"seed", o.seed},   {"samples", o.samples},
                 {"exact_max_n", o.exact_max_n},
                 {"gram", o.quadrature_gram ? "quadrature" : "riemann"}};
  json& out = j["rows"] = json::array();
  for (const auto& r : rows)
    out.push_back({{"n", r.n},
                   {"exact", r.exact},
                   {"mean", r.mean},
                   {"mean_se", r.mean_se},
                   {"second", r.second},
                   {"second_se", r.second_se},
                   {"third", r.third},
                   {"third_se", r.third_se},
                   {"second_exact", r.second_exact},
                   {"limit_second", r.limit_second},
                   {"limit_third", r.limit_third},
                   {"gap_second", r.gap_second},
                   {"gap_third", r.gap_third}});
  return finish_json(j, timer);
}

inline std::string cmd_sample(Options& o) {
  const std::string fmt = o.format.empty() ? "json" : o.format;
  require_format(fmt, {"json", "csv"});
  if (o.exprs.empty() || o.exprs.size() > 2) throw UsageError("sample takes one or two --expr");
  std::vector<GridFunction> fs;
  for (const auto& e : o.exprs) fs.push_back(sample(parse_expr(e), o.n));
  const McConfig mc{o.samples, o.seed};
  Timer timer(o.timings);
  json j;
  j["command"] = "sample";
  j["config"] = {{"n", o.n}, {"exprs", o.exprs}, {"seed", o.seed}, {"samples", o.samples}};
  if (fs.size() == 1) {
    const auto xs = timer.time("sample", [&] { return sample_phi(fs[0], mc, o.limits.workers); });
    if (fmt == "csv") {
      std::string s = "sample,phi\n";
      for (std::size_t i = 0; i < xs.size(); ++i) s += std::to_string(i) + "," + num(xs[i]) + "\n";
      return s;
    }
    detail::RunningStats st;
    for (double x : xs) st.add(x);
    const double var = riemann_inner_product(fs[0], fs[0]);
    j["summary"] = {{"mean", st.estimate().estimate},
                    {"variance", st.m2 / std::max(1.0, st.count - 1.0)},
                    {"target_variance", var},
                    {"ks_distance", ks_distance_normal(xs, var)}};
  } else {
    const auto ps = timer.time("sample", [&] {
      return sample_phi_pair(fs[0], fs[1], mc, o.limits.workers);
    });
    if (fmt == "csv") {
      std::string s = "sample,phi1,phi2\n";
      for (std::size_t i = 0; i < ps.size(); ++i)
        s += std::to_string(i) + "," + num(ps[i].first) + "," + num(ps[i].second) + "\n";
      return s;
    }
    const Covariance2 cov{riemann_inner_product(fs[0], fs[0]), riemann_inner_product(fs[0], fs[1]),
                          riemann_inner_product(fs[1], fs[1])};
    j["summary"] = {{"target_covariance", {cov.xx, cov.xy, cov.yy}},
                    {"cf_distance", cf_distance_2d(ps, cov)}};
  }
  return finish_json(j, timer);
}

inline std::string cmd_verify(Options& o, int& status) {
  const std::string fmt = o.format.empty() ? "text" : o.format;
  require_format(fmt, {"text", "json"});
  AcceptanceOptions opt;
  if (o.verify_seed) opt.seed = *o.verify_seed;
  opt.workers = o.limits.workers;
  const auto results = run_acceptance(opt);
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  status = all ? 0 : 1;
  if (fmt == "json") {
    json j;
    j["command"] = "verify";
    j["config"] = {{"seed", opt.seed}};
    json& cs = j["criteria"] = json::array();
    for (const auto& r : results) {
      json c = {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
      if (o.timings) c["seconds"] = r.seconds;
      cs.push_back(c);
    }
    j["passed"] = all;
    return j.dump(2) + "\n";
  }
  std::string s;
  for (const auto& r : results)
    s += std::string(r.passed ? "PASS" : "FAIL") + " criterion " + std::to_string(r.id) + " (" +
         r.name + "): " + r.detail + "\n";
  s += all ? "all criteria passed\n" : "some criteria FAILED\n";
  return s;
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

inline void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output file (default stdout)");
  sub->add_option("--format", o.format, "json or csv (verify: text or json)");
  sub->add_option("--threads", o.threads, "worker threads (default WICKLAB_THREADS or all cores)");
  sub->add_flag("--timings", o.timings, "include wall-clock timings in JSON");
  sub->add_option("--oracle-max-n", o.limits.oracle_max_n, "largest n for 2^n enumeration");
  sub->add_option("--max-vertices", o.limits.max_vertices, "largest total degree K");
  sub->add_option("--max-diagrams", o.limits.max_diagrams, "traversal diagram budget");
  sub->add_option("--max-terms", o.limits.max_expanded_terms, "expanded monomial budget (hermite)");
}

/// Runs one command line (without the program name). Output goes to `out`
/// unless --out is given; diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bernoulli-noise Wick calculus: moments, diagrams, limits", "wicklab"};
  app.require_subcommand(1);
  Options o;

  auto* moments = app.add_subcommand("moments", "E[prod phi(f_i)^p_i] by formula, oracle, Monte Carlo");
  moments->add_option("--n", o.n, "grid size");
  moments->add_option("--factor", o.factors, "\"expr\":power, repeatable")->required();
  moments->add_option("--engine", o.engine, "formula | oracle | mc | all");
  moments->add_option("--seed", o.seed);
  moments->add_option("--samples", o.samples);

  auto* wick = app.add_subcommand("wick", "E[prod :phi^p_i(f_i):] by several engines");
  wick->add_option("--n", o.n, "grid size");
  wick->add_option("--wick", o.wick, "\"expr\":power, repeatable")->required();
  wick->add_option("--engine", o.engine, "closed | traversal | oracle | gaussian | all");

  auto* diagrams = app.add_subcommand("diagrams", "diagram-by-diagram dump of a Wick moment");
  diagrams->add_option("--n", o.n, "grid size");
  diagrams->add_option("--wick", o.wick, "\"expr\":power, repeatable")->required();

  auto* converge = app.add_subcommand("converge", "Bernoulli vs Gaussian Wick moment over n");
  converge->add_option("--wick", o.wick, "\"expr\":power, repeatable")->required();
  converge->add_option("--grid", o.grid, "ascending grid sizes, e.g. 8,16,32,64")->required();
  converge->add_option("--inner", o.inner, "same-grid | quadrature");

  auto* hermite = app.add_subcommand("hermite", "moments of A_k^n against the Gaussian-chaos limit");
  hermite->add_option("--coeff", o.coeffs, "m1,..,mk=c in the cosine basis, repeatable")->required();
  hermite->add_option("--basis-size", o.basis_size, "number of basis functions");
  hermite->add_option("--grid", o.grid, "grid sizes (default 16,32,64,128,256)");
  hermite->add_option("--exact-max-n", o.exact_max_n, "exact enumeration up to this n");
  hermite->add_option("--gram-n", o.gram_n, "Riemann grid for the limit Gram matrix");
  hermite->add_flag("--quadrature-gram", o.quadrature_gram, "use quadrature inner products");
  hermite->add_option("--seed", o.seed);
  hermite->add_option("--samples", o.samples);

  auto* sample_cmd = app.add_subcommand("sample", "seeded samples of phi(f) or (phi(f), phi(g))");
  sample_cmd->add_option("--n", o.n, "grid size");
  sample_cmd->add_option("--expr", o.exprs, "one or two expressions")->required();
  sample_cmd->add_option("--seed", o.seed);
  sample_cmd->add_option("--samples", o.samples);

  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--seed", o.verify_seed);

  for (auto* sub : {moments, wick, diagrams, converge, hermite, sample_cmd, verify})
    add_common(sub, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "wicklab: " << e.what() << "\n";
    return 2;
  }

  try {
    o.limits.workers = o.threads;
    std::string text;
    int status = 0;
    if (*moments) text = cmd_moments(o);
    if (*wick) text = cmd_wick(o);
    if (*diagrams) text = cmd_diagrams(o);
    if (*converge) text = cmd_converge(o);
    if (*hermite) text = cmd_hermite(o);
    if (*sample_cmd) text = cmd_sample(o);
    if (*verify) text = cmd_verify(o, status);
    write_output(o.out, text, out);
    return status;
  } catch (const ParseError& e) {
    err << "wicklab: parse error " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "wicklab: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "wicklab: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    err << "wicklab: capacity exceeded: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "wicklab: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "wicklab: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wicklab::cli

#endif  // WICKLAB_TOOLS_CLI_HPP
