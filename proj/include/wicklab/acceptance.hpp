#ifndef WICKLAB_ACCEPTANCE_HPP
#define WICKLAB_ACCEPTANCE_HPP

// Cross-engine acceptance checks. Each criterion returns pass/fail plus the
// measured values; tolerances and runtime limits are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "diagrams.hpp"
#include "hermite.hpp"
#include "moments.hpp"
#include "numbers.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "wick.hpp"

namespace wicklab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  unsigned workers = 0;
};

namespace acceptance {

inline std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

/// Grid values uniform in [-1, 1).
inline GridFunction random_grid(std::size_t n, unsigned arity, rng::Stream& s) {
  std::vector<double> v(GridFunction::grid_points(n, arity));
  for (auto& x : v) x = s.next_uniform(-1.0, 1.0);
  return GridFunction::from_values(n, arity, std::move(v));
}

/// |a - b| <= tol * max(|a|, |b|, scale).
inline bool close(double a, double b, double tol, double scale) {
  return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), scale});
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SignCollapse {
  std::size_t checked = 0;
  std::size_t mismatched = 0;
};

inline CriterionResult criterion_1(const AcceptanceOptions& opt, SignCollapse& collapse) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  rng::Stream s(opt.seed, 1);
  double worst = 0.0;
  bool ok = true;
  int cases = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto f1 = random_grid(n, 1, s), f2 = random_grid(n, 1, s);
      const WickMomentSpec spec({{f1, 2}, {f2, 2}});
      const auto tr = wick_moment_traversal(spec, true, limits);
      const double closed = wick_moment_closed(spec, limits);
      const double oracle = wick_moment_oracle(spec, limits);
      const double cross = weighted_grid_sum({&f1, &f2});
      double quartic = 0.0;
      for (std::size_t k = 0; k < n; ++k) quartic += f1[k] * f1[k] * f2[k] * f2[k];
      quartic /= static_cast<double>(n * n);
      const double formula = 2.0 * cross * cross - 2.0 * quartic;
      const double scale = 2.0 * cross * cross + 2.0 * quartic;
      const double vals[] = {tr.total, closed, oracle, formula};
      for (double a : vals)
        for (double b : vals) {
          if (!close(a, b, 1e-10, scale)) ok = false;
          worst = std::max(worst, std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), scale}));
        }
      for (const auto& [key, sum] : traversal_sign_sums(tr.terms)) {
        ++collapse.checked;
        const auto expect = block_coefficient(static_cast<unsigned>(std::popcount(key.second)));
        if (Rational(sum) != expect) ++collapse.mismatched;
      }
      ++cases;
    }
  }
  const double secs = seconds_since(t0);
  CriterionResult r{1, "worked example (:phi^2(f1):, :phi^2(f2):)", ok && secs < 1.0, "", secs};
  r.detail = fmt("%d cases, n=1..10; max rel diff %.3g (tol 1e-10); %.3fs (limit 1s)", cases,
                 worst, secs);
  return r;
}

inline CriterionResult criterion_2(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  rng::Stream s(opt.seed, 2);
  bool ok = true;
  double worst_n1 = 0.0, worst = 0.0, largest = -INFINITY;
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_grid(1, 1, s);
    const double a = f[0];
    const WickMomentSpec spec({{f, 3}, {f, 1}});
    const double expect = -2.0 * a * a * a * a;
    for (double v : {wick_moment_traversal(spec, false, limits).total,
                     wick_moment_closed(spec, limits), wick_moment_oracle(spec, limits)}) {
      worst_n1 = std::max(worst_n1, std::fabs(v - expect));
      if (std::fabs(v - expect) > 1e-12) ok = false;
    }
  }
  for (std::size_t n = 2; n <= 10; ++n) {
    const auto f = random_grid(n, 1, s);
    const WickMomentSpec spec({{f, 3}, {f, 1}});
    const double oracle = wick_moment_oracle(spec, limits);
    const double scale = 2.0 * weighted_grid_sum({&f, &f, &f, &f});
    for (double v : {wick_moment_traversal(spec, false, limits).total,
                     wick_moment_closed(spec, limits)}) {
      if (!close(v, oracle, 1e-10, scale)) ok = false;
      worst = std::max(worst, std::fabs(v - oracle) / std::max(std::fabs(oracle), scale));
      largest = std::max(largest, v);
      if (!(v < 0.0)) ok = false;
    }
  }
  const double secs = seconds_since(t0);
  CriterionResult r{2, "non-orthogonality (:phi^3(f):, :phi(f):)", ok, "", secs};
  r.detail = fmt("n=1 max |v + 2a^4| %.3g (tol 1e-12); n=2..10 max rel diff %.3g (tol 1e-10), "
                 "largest value %.4g (must be < 0)",
                 worst_n1, worst, largest);
  return r;
}

inline CriterionResult criterion_3(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  rng::Stream s(opt.seed, 3);
  bool ok = true;
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + s.next_int(0, 9);
    const unsigned nf = static_cast<unsigned>(s.next_int(1, 3));
    unsigned budget = static_cast<unsigned>(s.next_int(nf, 8));
    std::vector<MomentSpec::Factor> factors;
    for (unsigned i = 0; i < nf; ++i) {
      const unsigned left = nf - i - 1;
      const unsigned p = i + 1 == nf ? budget
                                     : static_cast<unsigned>(s.next_int(1, budget - left));
      budget -= p;
      factors.push_back({random_grid(n, 1, s), p});
    }
    const MomentSpec spec(std::move(factors));
    const double formula = moment_partition_formula(spec, limits);
    const double brute = moment_bruteforce(spec, limits);
    // Scale: E |prod phi_i^{p_i}|, the size of the terms being averaged.
    const double scale = detail::average_over_signs(n, opt.workers, [&](auto eps) {
      return std::fabs(detail::power_product(spec, eps));
    });
    if (!close(formula, brute, 1e-10, scale)) ok = false;
    worst = std::max(worst, std::fabs(formula - brute) /
                                std::max({std::fabs(formula), std::fabs(brute), scale}));
  }
  const double secs = seconds_since(t0);
  CriterionResult r{3, "moment formula vs 2^n brute force", ok && secs < 30.0, "", secs};
  r.detail = fmt("200 specs, n<=10, degree<=8; max rel diff %.3g (tol 1e-10); %.3fs (limit 30s)",
                 worst, secs);
  return r;
}

inline CriterionResult criterion_4(const SignCollapse& collapse) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (unsigned size = 2; size <= 20; size += 2)
    if (alternating_eulerian_sum(size) != block_coefficient(size)) ok = false;
  ok = ok && collapse.checked > 0 && collapse.mismatched == 0;
  const double secs = seconds_since(t0);
  CriterionResult r{4, "Eulerian-Bernoulli identity", ok, "", secs};
  r.detail = fmt("sizes 2..20 exact; %zu per-block sign sums from criterion 1, %zu mismatched",
                 collapse.checked, collapse.mismatched);
  return r;
}

inline CriterionResult criterion_5(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  bool ok = true;
  double worst_deriv = 0.0, worst_mean = 0.0, worst_path = 0.0;
  std::vector<std::pair<std::vector<double>, const GridFunction*>> bases;
  bases.push_back({bernoulli_sign_moments(12), nullptr});
  const GridFunction f1 = sample(parse_expr("sin(3*x) + x"), 6);
  const GridFunction f2 = sample(parse_expr("exp(x)"), 9);
  bases.push_back({noise_moments(f1, 12, MomentEngine::partition_formula, limits), &f1});
  bases.push_back({noise_moments(f2, 12, MomentEngine::partition_formula, limits), &f2});
  for (const auto& [mu, f] : bases) {
    const auto P = wick_polynomials(mu);
    for (unsigned m = 1; m <= 12; ++m) {
      const auto& p = P[m];
      if (p.coeffs.size() != m + 1 || p.coeffs[m] != 1.0) ok = false;
      const auto d = p.derivative();
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double want = m * P[m - 1].coeffs[i];
        const double err = std::fabs(d[i] - want) / std::max(1.0, std::fabs(want));
        worst_deriv = std::max(worst_deriv, err);
        if (err > 1e-9) ok = false;
      }
      double mag = 0.0;
      for (std::size_t i = 0; i <= m; ++i) mag += std::fabs(p.coeffs[i] * mu[i]);
      const double err = std::fabs(p.mean()) / std::max(1.0, mag);
      worst_mean = std::max(worst_mean, err);
      if (err > 1e-9) ok = false;
      if (f != nullptr) {
        const double avg = detail::average_over_signs(f->n(), opt.workers, [&](auto eps) {
          return p(detail::phi_raw(f->values(), eps));
        });
        const double perr = std::fabs(avg) / std::max(1.0, mag);
        worst_path = std::max(worst_path, perr);
        if (perr > 1e-10) ok = false;
      }
    }
  }
  const double secs = seconds_since(t0);
  CriterionResult r{5, "Wick polynomial laws", ok, "", secs};
  r.detail = fmt("m<=12, 3 bases; derivative %.3g, mean %.3g (tol 1e-9), pathwise mean %.3g "
                 "(tol 1e-10), all monic",
                 worst_deriv, worst_mean, worst_path);
  return r;
}

inline CriterionResult criterion_6(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  bool ok = true;
  const auto mu = bernoulli_sign_moments(40);
  double worst_partial = 0.0;
  for (double alpha : {0.25, 0.5, 1.0})
    for (double x : {1.0, -1.0}) {
      const double err = std::fabs(stochastic_exponent_partial(alpha, mu, x, 40) -
                                   std::exp(alpha * x) / std::cosh(alpha));
      worst_partial = std::max(worst_partial, err);
      if (err > 1e-8) ok = false;
    }
  double worst_mean = 0.0;
  const GridFunction f = sample(parse_expr("1 + sin(2*pi*x)"), 12);
  for (double alpha : {0.25, 0.5, 1.0}) {
    const double mean = detail::average_over_signs(f.n(), opt.workers, [&](auto eps) {
      std::vector<signed char> copy(eps.begin(), eps.end());
      return stochastic_exponent_closed(alpha, f, SignVector(std::move(copy)));
    });
    worst_mean = std::max(worst_mean, std::fabs(mean - 1.0));
    if (std::fabs(mean - 1.0) > 1e-10) ok = false;
  }
  const double secs = seconds_since(t0);
  CriterionResult r{6, "stochastic exponent", ok, "", secs};
  r.detail = fmt("N=40 partial sums max err %.3g (tol 1e-8); E :exp: at n=12 max |mean-1| %.3g "
                 "(tol 1e-10)",
                 worst_partial, worst_mean);
  return r;
}

inline CriterionResult criterion_7(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string parts;
  for (const char* src : {"x", "sin(3*x)", "exp(x)"}) {
    const GridFunction f = sample(parse_expr(src), 2000);
    const double var = weighted_grid_sum({&f, &f});
    const auto xs = sample_phi(f, McConfig{100000, opt.seed}, opt.workers);
    const double ks = ks_distance_normal(xs, var);
    if (ks >= 0.01) ok = false;
    parts += fmt("%s%s KS %.4f", parts.empty() ? "" : ", ", src, ks);
  }
  const double secs = seconds_since(t0);
  CriterionResult r{7, "weak convergence to Gaussian", ok && secs < 10.0, "", secs};
  r.detail = parts + fmt(" (tol 0.01); n=2000, 1e5 samples; %.3fs (limit 10s)", secs);
  return r;
}

inline CriterionResult criterion_8(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  const std::vector<WickTemplateFactor> tmpl{{parse_expr("sin(3*x)"), 2}, {parse_expr("x"), 2}};
  const std::vector<std::size_t> ns{8, 16, 32, 64};
  const auto rows = convergence_study(tmpl, ns, GaussianInnerProduct::same_grid, limits);
  bool ok = true;
  std::string ratios;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double q = rows[i].abs_error / rows[i + 1].abs_error;
    if (!(q >= 1.6 && q <= 2.4)) ok = false;
    ratios += fmt("%s%.3f", ratios.empty() ? "" : ", ", q);
  }
  double lo = INFINITY, hi = 0.0;
  for (const auto& row : rows) {
    lo = std::min(lo, row.error_times_n);
    hi = std::max(hi, row.error_times_n);
  }
  const double spread = (hi - lo) / lo;
  if (!(spread < 0.25)) ok = false;
  const double secs = seconds_since(t0);
  CriterionResult r{8, "diagram vanishing rate", ok, "", secs};
  r.detail = fmt("error ratios per doubling [%s] (range [1.6, 2.4]); error*n spread %.3f (< 0.25)",
                 ratios.c_str(), spread);
  return r;
}

inline CriterionResult criterion_9(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  rng::Stream s(opt.seed, 9);
  bool ok = true;
  double worst_cross = 0.0, worst_mean = 0.0;
  int pairs = 0;
  for (std::size_t n : {4u, 7u, 12u}) {
    std::vector<KForm> forms;
    for (unsigned k = 1; k <= 4; ++k) forms.push_back(KForm::from_grid(random_grid(n, k, s)));
    for (unsigned k = 0; k < 4; ++k) {
      const double mean = kform_mean_exact(forms[k], limits);
      worst_mean = std::max(worst_mean, std::fabs(mean));
      if (std::fabs(mean) > 1e-12) ok = false;
      for (unsigned m = k + 1; m < 4; ++m) {
        const double c = kform_orthogonality_check(forms[k], forms[m], limits);
        worst_cross = std::max(worst_cross, std::fabs(c));
        if (std::fabs(c) > 1e-12) ok = false;
        ++pairs;
      }
    }
  }
  const double secs = seconds_since(t0);
  CriterionResult r{9, "A_k^n orthogonality", ok, "", secs};
  r.detail = fmt("%d pairs k != m <= 4, n in {4,7,12}; max |E A_k A_m| %.3g, max |E A_k| %.3g "
                 "(tol 1e-12)",
                 pairs, worst_cross, worst_mean);
  return r;
}

inline CriterionResult criterion_10(const AcceptanceOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  EngineLimits limits;
  limits.workers = opt.workers;
  MultiIndexCoeffs f;
  f.arity = 2;
  f.basis = cosine_basis(2);
  f.coeffs[{1, 2}] = 1.0;
  const std::vector<std::size_t> ns{16, 32, 64, 128, 256};
  const auto rows = kform_limit_check(f, ns, McConfig{100000, opt.seed}, {}, limits);
  bool ok = true;
  std::string ratios;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double q = rows[i].gap_second / rows[i + 1].gap_second;
    if (!(q >= 1.5 && q <= 2.5)) ok = false;
    ratios += fmt("%s%.3f", ratios.empty() ? "" : ", ", q);
  }
  const double limit2 = rows.back().limit_second;
  if (std::fabs(limit2 - 1.0) > 1e-6) ok = false;
  const auto& last = rows.back();
  const double z = std::fabs(last.third - last.limit_third) / last.third_se;
  if (!(z <= 4.0)) ok = false;
  const double secs = seconds_since(t0);
  CriterionResult r{10, "Hermite limit of A_2^n", ok, "", secs};
  r.detail = fmt("limit E F^2 = %.9f (within 1e-6 of 1); second-moment gap ratios [%s] (range [1.5, 2.5]); "
                 "n=256 E A^3 = %.4f +- %.4f vs limit %.4f (%.2f se, max 4)",
                 limit2, ratios.c_str(), last.third, last.third_se, last.limit_third, z);
  return r;
}

}  // namespace acceptance

/// Runs criteria 1..10 in order.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}) {
  std::vector<CriterionResult> out;
  acceptance::SignCollapse collapse;
  out.push_back(acceptance::criterion_1(opt, collapse));
  out.push_back(acceptance::criterion_2(opt));
  out.push_back(acceptance::criterion_3(opt));
  out.push_back(acceptance::criterion_4(collapse));
  out.push_back(acceptance::criterion_5(opt));
  out.push_back(acceptance::criterion_6(opt));
  out.push_back(acceptance::criterion_7(opt));
  out.push_back(acceptance::criterion_8(opt));
  out.push_back(acceptance::criterion_9(opt));
  out.push_back(acceptance::criterion_10(opt));
  return out;
}

}  // namespace wicklab

#endif  // WICKLAB_ACCEPTANCE_HPP
