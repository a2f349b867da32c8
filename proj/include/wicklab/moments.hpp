#ifndef WICKLAB_MOMENTS_HPP
#define WICKLAB_MOMENTS_HPP

// Moments E[phi^{q_1}(f_1) ... phi^{q_j}(f_j)] of the Bernoulli noise
// phi(f) = sum_{k=1}^n f(k/n) eps_k / sqrt(n), computed three ways:
//
//   moment_bruteforce         average over all 2^n sign vectors
//   moment_partition_formula  sum over even set partitions of cumulant blocks
//   moment_montecarlo         seeded sampling of sign vectors

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "numbers.hpp"
#include "parallel.hpp"
#include "partitions.hpp"
#include "rng.hpp"

namespace wicklab {

struct EngineLimits {
  /// Largest n for which the 2^n sign-vector enumeration is allowed.
  unsigned oracle_max_n = 20;
  /// Largest total vertex count K for partition enumeration.
  unsigned max_vertices = kDefaultMaxVertices;
  /// Largest number of diagrams the traversal engine may visit.
  std::uint64_t max_diagrams = 20'000'000;
  /// Largest number of expanded Wick monomial products (Hermite moments).
  std::uint64_t max_expanded_terms = 1'000'000;
  /// 0 means default_workers().
  unsigned workers = 0;
};

struct McConfig {
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::vector<signed char> signs) : signs_(std::move(signs)) {
    for (signed char s : signs_)
      if (s != 1 && s != -1) throw std::invalid_argument("SignVector: entries must be +1 or -1");
  }

  /// Bit k of `mask` set means eps_{k+1} = -1.
  static SignVector from_mask(std::size_t n, std::uint64_t mask) {
    std::vector<signed char> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = ((mask >> k) & 1u) ? -1 : 1;
    return SignVector(std::move(s));
  }

  /// Sign vector of Monte Carlo sample `stream` (see rng.hpp).
  static SignVector random(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    std::vector<signed char> s(n);
    fill_random(s, seed, stream);
    SignVector v;
    v.signs_ = std::move(s);
    return v;
  }

  static void fill_random(std::span<signed char> out, std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t w = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      if (k % 64 == 0) w = rng::word(seed, stream, k / 64);
      out[k] = ((w >> (k % 64)) & 1u) ? -1 : 1;
    }
  }

  std::size_t size() const noexcept { return signs_.size(); }
  int operator[](std::size_t k) const noexcept { return signs_[k]; }
  std::span<const signed char> signs() const noexcept { return signs_; }

 private:
  std::vector<signed char> signs_;
};

namespace detail {

/// sum_k f_k eps_k, then times n^{-1/2}.
inline double phi_raw(std::span<const double> f, std::span<const signed char> eps) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * eps[k];
  return s * grid_scale(f.size(), 1);
}

/// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

/// Streaming mean / variance (Welford) with Chan's merge.
struct RunningStats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) noexcept {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) noexcept {
    if (o.count == 0.0) return;
    if (count == 0.0) {
      *this = o;
      return;
    }
    const double total = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / total;
    m2 += o.m2 + d * d * count * o.count / total;
    count = total;
  }
  McEstimate estimate() const noexcept {
    if (count < 2.0) return {mean, std::numeric_limits<double>::infinity()};
    return {mean, std::sqrt(m2 / (count - 1.0) / count)};
  }
};

inline void check_oracle_n(std::size_t n, const EngineLimits& limits, const char* who) {
  if (n > limits.oracle_max_n || n > 62)
    throw CapacityError(std::string(who) + ": n = " + std::to_string(n) +
                        " exceeds oracle cap " + std::to_string(limits.oracle_max_n));
}

/// Exact average of fn(eps) over all 2^n sign vectors. Chunks are fixed by n
/// alone and reduced in order, so the result does not depend on `workers`.
template <class Fn>
double average_over_signs(std::size_t n, unsigned workers, Fn&& fn) {
  const std::uint64_t total = std::uint64_t{1} << n;
  const unsigned chunk_bits = n > 10 ? 10 : static_cast<unsigned>(n);
  const std::uint64_t chunk = std::uint64_t{1} << chunk_bits;
  const std::uint64_t chunks = total / chunk;
  auto partial = map_chunks<CompensatedSum>(chunks, workers, [&](std::size_t c) {
    CompensatedSum acc;
    std::vector<signed char> eps(n);
    for (std::uint64_t m = c * chunk; m < (c + 1) * chunk; ++m) {
      for (std::size_t k = 0; k < n; ++k) eps[k] = ((m >> k) & 1u) ? -1 : 1;
      acc.add(fn(std::span<const signed char>(eps)));
    }
    return acc;
  });
  CompensatedSum acc;
  for (const auto& p : partial) {
    acc.add(p.sum);
    acc.add(p.carry);
  }
  return acc.value() / static_cast<double>(total);
}

/// Mean and standard error of fn(eps) over cfg.samples random sign vectors.
template <class Fn>
McEstimate monte_carlo(std::size_t n, const McConfig& cfg, unsigned workers, Fn&& fn) {
  if (cfg.samples == 0) throw std::invalid_argument("McConfig: samples must be >= 1");
  constexpr std::uint64_t chunk = 4096;
  const std::uint64_t chunks = (cfg.samples + chunk - 1) / chunk;
  auto partial = map_chunks<RunningStats>(chunks, workers, [&](std::size_t c) {
    RunningStats st;
    std::vector<signed char> eps(n);
    const std::uint64_t end = std::min<std::uint64_t>(cfg.samples, (c + 1) * chunk);
    for (std::uint64_t s = c * chunk; s < end; ++s) {
      SignVector::fill_random(eps, cfg.seed, s);
      st.add(fn(std::span<const signed char>(eps)));
    }
    return st;
  });
  RunningStats all;
  for (const auto& p : partial) all.merge(p);
  return all.estimate();
}

/// sum over partitions of {1..K} into even blocks of prod_B weight(B),
/// organised as the anchored-first-block recursion memoized on the set of
/// still-unassigned vertices. weight(B) == 0 prunes the branch.
template <class Weight>
double even_partition_sum(unsigned K, Weight&& weight) {
  if (K == 0) return 1.0;
  if (K % 2 == 1) return 0.0;
  if (K > 26) throw CapacityError("even_partition_sum: K too large for memo table");
  const VertexMask all = static_cast<VertexMask>((std::uint64_t{1} << K) - 1);
  const double unset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> memo(std::size_t{all} + 1, unset);
  std::vector<double> wmemo(std::size_t{all} + 1, unset);
  memo[0] = 1.0;

  auto rec = [&](auto& self, VertexMask S) -> double {
    if (!std::isnan(memo[S])) return memo[S];
    const VertexMask anchor = S & (~S + 1);
    const VertexMask rest = S & ~anchor;
    double total = 0.0;
    for (VertexMask T = rest; T; T = (T - 1) & rest) {
      if (std::popcount(T) % 2 == 0) continue;
      const VertexMask B = anchor | T;
      double& w = wmemo[B];
      if (std::isnan(w)) w = weight(B);
      if (w == 0.0) continue;
      total += w * self(self, S & ~B);
    }
    return memo[S] = total;
  };
  return rec(rec, all);
}

}  // namespace detail

/// Ordered list of (grid function, power) factors sharing one grid size.
template <class Tag>
class FactorSpec {
 public:
  struct Factor {
    GridFunction f;
    unsigned power = 1;
  };

  FactorSpec() = default;
  explicit FactorSpec(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("spec: at least one factor required");
    for (const auto& fac : factors_) {
      if (fac.power == 0) throw std::invalid_argument("spec: powers must be positive");
      detail::require_univariate(fac.f, "spec");
      detail::require_same_n(factors_[0].f, fac.f, "spec");
    }
  }

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t n() const noexcept { return factors_.empty() ? 0 : factors_[0].f.n(); }

  unsigned total_degree() const noexcept {
    unsigned K = 0;
    for (const auto& fac : factors_) K += fac.power;
    return K;
  }

  std::vector<unsigned> powers() const {
    std::vector<unsigned> p;
    for (const auto& fac : factors_) p.push_back(fac.power);
    return p;
  }

  VertexLabeling labeling() const { return VertexLabeling::from_counts(powers()); }

  /// Factor index (0-based) owning each vertex (0-based).
  std::vector<std::size_t> vertex_factors() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      out.insert(out.end(), factors_[i].power, i);
    return out;
  }

 private:
  std::vector<Factor> factors_;
};

using MomentSpec = FactorSpec<struct MomentSpecTag>;

inline double phi_eval(const GridFunction& f, const SignVector& eps) {
  detail::require_univariate(f, "phi_eval");
  if (f.n() != eps.size())
    throw std::invalid_argument("phi_eval: grid size " + std::to_string(f.n()) +
                                " but sign vector length " + std::to_string(eps.size()));
  return detail::phi_raw(f.values(), eps.signs());
}

namespace detail {

template <class Tag>
double power_product(const FactorSpec<Tag>& spec, std::span<const signed char> eps) {
  double prod = 1.0;
  for (const auto& fac : spec.factors())
    prod *= ipow(phi_raw(fac.f.values(), eps), fac.power);
  return prod;
}

/// n^{-|B|/2} sum_k prod_{v in B} f_{factor(v)}(k/n).
inline double block_grid_sum(VertexMask block, std::span<const std::size_t> vertex_factor,
                             std::span<const GridFunction* const> functions) {
  std::vector<const GridFunction*> fs;
  for (VertexMask b = block; b; b &= b - 1)
    fs.push_back(functions[vertex_factor[static_cast<std::size_t>(std::countr_zero(b))]]);
  return weighted_grid_sum(fs);
}

}  // namespace detail

inline double moment_bruteforce(const MomentSpec& spec, const EngineLimits& limits = {}) {
  detail::check_oracle_n(spec.n(), limits, "moment_bruteforce");
  return detail::average_over_signs(spec.n(), limits.workers,
                                    [&](std::span<const signed char> eps) {
                                      return detail::power_product(spec, eps);
                                    });
}

// At lambda = 0 every block D of a partition keeps only its 2p = |D| term:
// higher p carry a positive power of lambda, and 1/(2p - |D|)! = 1. Odd
// blocks have no surviving term, so only even partitions remain and each
// block is weighted by block_coefficient(|D|).
inline double moment_partition_formula(const MomentSpec& spec, const EngineLimits& limits = {}) {
  const unsigned K = spec.total_degree();
  if (K % 2 == 1) return 0.0;
  detail::check_vertex_cap(K, limits.max_vertices);
  const auto coeff = block_coefficient_table(K);
  const auto vf = spec.vertex_factors();
  std::vector<const GridFunction*> fns;
  for (const auto& fac : spec.factors()) fns.push_back(&fac.f);
  return detail::even_partition_sum(K, [&](VertexMask block) {
    return coeff[static_cast<std::size_t>(std::popcount(block))] *
           detail::block_grid_sum(block, vf, fns);
  });
}

/// E[phi^i(f)] for i = 0..m from the same partition sum, grouped by block
/// sizes: with the block through vertex 1 of size j + 1,
///   a_m = sum_{j odd} C(m-1, j) c_{j+1} n^{-(j+1)/2} (sum_k f_k^{j+1}) a_{m-1-j}.
/// Block coefficients alternate and grow factorially, so the recursion runs
/// in exact rationals (every f_k is a dyadic rational and n^{-(j+1)/2} is
/// rational for even j + 1).
inline std::vector<double> single_factor_moments(const GridFunction& f, unsigned m) {
  detail::require_univariate(f, "single_factor_moments");
  const Rational inv_n(BigInt(1), BigInt(f.n()));
  std::vector<Rational> xs;
  for (double v : f.values()) xs.emplace_back(v);
  std::vector<Rational> block(m + 1);  // c_s n^{-s/2} sum_k f_k^s, s even
  std::vector<Rational> pw(xs.size(), Rational(1));
  Rational scale(1);
  for (unsigned s = 1; s <= m; ++s) {
    Rational sum(0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      pw[k] *= xs[k];
      if (s % 2 == 0) sum += pw[k];
    }
    if (s % 2 == 0) {
      scale *= inv_n;
      block[s] = block_coefficient(s) * scale * sum;
    }
  }
  std::vector<Rational> a(m + 1);
  a[0] = 1;
  for (unsigned i = 1; i <= m; ++i) {
    if (i % 2 == 1) continue;
    Rational t(0);
    for (unsigned j = 1; j <= i - 1; j += 2) t += Rational(binomial(i - 1, j)) * block[j + 1] * a[i - 1 - j];
    a[i] = t;
  }
  std::vector<double> out(m + 1);
  for (unsigned i = 0; i <= m; ++i) out[i] = to_double(a[i]);
  return out;
}

inline McEstimate moment_montecarlo(const MomentSpec& spec, const McConfig& cfg,
                                    unsigned workers = 0) {
  return detail::monte_carlo(spec.n(), cfg, workers, [&](std::span<const signed char> eps) {
    return detail::power_product(spec, eps);
  });
}

/// cfg.samples draws of phi(f), sample i from stream i.
inline std::vector<double> sample_phi(const GridFunction& f, const McConfig& cfg,
                                      unsigned workers = 0) {
  detail::require_univariate(f, "sample_phi");
  constexpr std::uint64_t chunk = 4096;
  const std::uint64_t chunks = (cfg.samples + chunk - 1) / chunk;
  auto parts = map_chunks<std::vector<double>>(chunks, workers, [&](std::size_t c) {
    std::vector<double> out;
    std::vector<signed char> eps(f.n());
    const std::uint64_t end = std::min<std::uint64_t>(cfg.samples, (c + 1) * chunk);
    for (std::uint64_t s = c * chunk; s < end; ++s) {
      SignVector::fill_random(eps, cfg.seed, s);
      out.push_back(detail::phi_raw(f.values(), eps));
    }
    return out;
  });
  std::vector<double> all;
  all.reserve(cfg.samples);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

/// Joint draws (phi(f), phi(g)) sharing each sign vector.
inline std::vector<std::pair<double, double>> sample_phi_pair(const GridFunction& f,
                                                              const GridFunction& g,
                                                              const McConfig& cfg,
                                                              unsigned workers = 0) {
  detail::require_same_n(f, g, "sample_phi_pair");
  constexpr std::uint64_t chunk = 4096;
  const std::uint64_t chunks = (cfg.samples + chunk - 1) / chunk;
  using Block = std::vector<std::pair<double, double>>;
  auto parts = map_chunks<Block>(chunks, workers, [&](std::size_t c) {
    Block out;
    std::vector<signed char> eps(f.n());
    const std::uint64_t end = std::min<std::uint64_t>(cfg.samples, (c + 1) * chunk);
    for (std::uint64_t s = c * chunk; s < end; ++s) {
      SignVector::fill_random(eps, cfg.seed, s);
      out.emplace_back(detail::phi_raw(f.values(), eps), detail::phi_raw(g.values(), eps));
    }
    return out;
  });
  Block all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

}  // namespace wicklab

#endif  // WICKLAB_MOMENTS_HPP
