#ifndef WICKLAB_WICK_HPP
#define WICKLAB_WICK_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "moments.hpp"

namespace wicklab {

/// Monic P_m with P_m' = m P_{m-1} and E P_m(eta) = 0, built from the
/// moments mu_i = E[eta^i] of one random variable eta.
struct WickPolynomial {
  unsigned degree = 0;
  std::vector<double> coeffs;        // coeffs[i] multiplies x^i
  std::vector<double> base_moments;  // mu_0 .. mu_degree

  double operator()(double x) const noexcept {
    double r = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
    return r;
  }

  std::vector<double> derivative() const {
    std::vector<double> d;
    for (std::size_t i = 1; i < coeffs.size(); ++i) d.push_back(static_cast<double>(i) * coeffs[i]);
    return d;
  }

  /// sum_i coeffs[i] mu_i, the expectation of P_m(eta).
  double mean() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * base_moments[i];
    return s;
  }
};

namespace detail {
inline void require_unit_mass(std::span<const double> moments, const char* who) {
  if (moments.empty()) throw std::invalid_argument(std::string(who) + ": mu_0 missing");
  if (std::fabs(moments[0] - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": mu_0 must equal 1");
}
}  // namespace detail

/// P_0 .. P_m where m = moments.size() - 1, via
/// P_m(x) = x^m - sum_{i=1}^{m} C(m, i) mu_i P_{m-i}(x).
inline std::vector<WickPolynomial> wick_polynomials(std::span<const double> moments) {
  detail::require_unit_mass(moments, "wick_polynomial");
  const unsigned m = static_cast<unsigned>(moments.size() - 1);
  std::vector<WickPolynomial> P(m + 1);
  for (unsigned d = 0; d <= m; ++d) {
    auto& p = P[d];
    p.degree = d;
    p.base_moments.assign(moments.begin(), moments.begin() + d + 1);
    p.coeffs.assign(d + 1, 0.0);
    p.coeffs[d] = 1.0;
    double binom = 1.0;  // C(d, i)
    for (unsigned i = 1; i <= d; ++i) {
      binom = binom * static_cast<double>(d - i + 1) / static_cast<double>(i);
      const double w = binom * moments[i];
      if (w == 0.0) continue;
      const auto& q = P[d - i].coeffs;
      for (std::size_t j = 0; j < q.size(); ++j) p.coeffs[j] -= w * q[j];
    }
    p.coeffs[d] = 1.0;
  }
  return P;
}

inline WickPolynomial wick_polynomial(std::span<const double> moments) {
  return wick_polynomials(moments).back();
}

/// Moments of a single symmetric +-1 variable: 1, 0, 1, 0, ...
inline std::vector<double> bernoulli_sign_moments(unsigned m) {
  std::vector<double> mu(m + 1);
  for (unsigned i = 0; i <= m; ++i) mu[i] = i % 2 == 0 ? 1.0 : 0.0;
  return mu;
}

/// Standard normal moments: mu_{2j} = (2j - 1)!!, odd moments 0.
inline std::vector<double> gaussian_moments(unsigned m) {
  std::vector<double> mu(m + 1, 0.0);
  mu[0] = 1.0;
  for (unsigned i = 2; i <= m; i += 2) mu[i] = mu[i - 2] * static_cast<double>(i - 1);
  return mu;
}

enum class MomentEngine { partition_formula, bruteforce };

/// E[phi^i(f)] for i = 0..m.
inline std::vector<double> noise_moments(const GridFunction& f, unsigned m,
                                         MomentEngine engine = MomentEngine::partition_formula,
                                         const EngineLimits& limits = {}) {
  detail::require_univariate(f, "noise_moments");
  std::vector<double> mu(m + 1, 0.0);
  mu[0] = 1.0;
  if (engine == MomentEngine::bruteforce) {
    detail::check_oracle_n(f.n(), limits, "noise_moments");
    // Odd moments vanish by the eps -> -eps symmetry.
    for (unsigned i = 2; i <= m; i += 2) mu[i] = moment_bruteforce(MomentSpec({{f, i}}), limits);
    return mu;
  }
  return single_factor_moments(f, m);
}

/// :phi^m(f): as a polynomial in the scalar phi(f).
inline WickPolynomial wick_power_of_noise(const GridFunction& f, unsigned m,
                                          MomentEngine engine = MomentEngine::partition_formula,
                                          const EngineLimits& limits = {}) {
  return wick_polynomial(noise_moments(f, m, engine, limits));
}

/// sum_{k=0}^{N} alpha^k P_k(x) / k!. Runs the same recursion on
/// Q_k = P_k / k!, i.e. Q_k(x) = x^k/k! - sum_{i=1}^{k} (mu_i / i!) Q_{k-i}(x),
/// which keeps every intermediate O(1).
inline double stochastic_exponent_partial(double alpha, std::span<const double> moments, double x,
                                          unsigned N) {
  detail::require_unit_mass(moments, "stochastic_exponent_partial");
  if (moments.size() < static_cast<std::size_t>(N) + 1)
    throw std::invalid_argument("stochastic_exponent_partial: need moments up to order N");
  std::vector<double> scaled(N + 1);  // mu_i / i!
  std::vector<double> q(N + 1);
  double inv_fact = 1.0;
  double xpow = 1.0;  // x^k / k!
  double apow = 1.0;
  double total = 0.0;
  for (unsigned k = 0; k <= N; ++k) {
    if (k > 0) {
      inv_fact /= static_cast<double>(k);
      xpow *= x / static_cast<double>(k);
      apow *= alpha;
    }
    scaled[k] = moments[k] * inv_fact;
    double v = xpow;
    for (unsigned i = 1; i <= k; ++i) v -= scaled[i] * q[k - i];
    q[k] = v;
    total += apow * v;
  }
  return total;
}

namespace detail {
/// log cosh(x) without overflow.
inline double log_cosh(double x) {
  const double a = std::fabs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}
}  // namespace detail

/// exp(alpha phi(f)) / prod_k cosh(alpha f(k/n) / sqrt(n)), i.e.
/// exp(alpha phi) / E exp(alpha phi).
inline double stochastic_exponent_closed(double alpha, const GridFunction& f,
                                         const SignVector& eps) {
  const double phi = phi_eval(f, eps);
  const double s = grid_scale(f.n(), 1);
  double log_norm = 0.0;
  for (double v : f.values()) log_norm += detail::log_cosh(alpha * v * s);
  const double r = std::exp(alpha * phi - log_norm);
  if (!std::isfinite(r))
    throw NumericError("stochastic_exponent_closed: overflow for alpha = " + std::to_string(alpha));
  return r;
}

}  // namespace wicklab

#endif  // WICKLAB_WICK_HPP
