#ifndef WICKLAB_DIAGRAMS_HPP
#define WICKLAB_DIAGRAMS_HPP

// Expectations of products of Wick powers E[:phi^{n_1}(f_1): ... :phi^{n_N}(f_N):].
//
// Vertices 1..K (K = sum n_i) are labelled by the factor they come from.
// A diagram is an even-block partition with no block confined to a single
// factor, plus one traversal per block starting at the block minimum. Its
// value is
//
//   I(G) = prod_s (-1)^{m_s - 1} n^{-|s|/2} sum_k prod_{v in s} f_{v}(k/n)
//
// with m_s the ascent count of the traversal. Summing the traversal signs of a
// block gives block_coefficient(|s|), which is the closed form.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "expr.hpp"
#include "grid.hpp"
#include "moments.hpp"
#include "numbers.hpp"
#include "partitions.hpp"
#include "wick.hpp"

namespace wicklab {

using WickMomentSpec = FactorSpec<struct WickMomentSpecTag>;

struct DiagramTerm {
  Diagram diagram;
  /// Per block, (-1)^{m-1} times the block grid sum.
  std::vector<double> block_values;
  double value = 0.0;
};

struct TraversalResult {
  double total = 0.0;
  std::vector<DiagramTerm> terms;
  std::uint64_t diagram_count = 0;
};

namespace detail {

inline std::vector<const GridFunction*> factor_functions(const WickMomentSpec& spec) {
  std::vector<const GridFunction*> fns;
  for (const auto& fac : spec.factors()) fns.push_back(&fac.f);
  return fns;
}

inline std::uint64_t factorial_u64(unsigned n) {
  std::uint64_t r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Sum over perfect matchings of {1..K} of prod weight(a, b) (0-based vertices).
template <class PairWeight>
double pair_partition_sum(unsigned K, PairWeight&& weight) {
  if (K == 0) return 1.0;
  if (K % 2 == 1) return 0.0;
  if (K > 26) throw CapacityError("pair_partition_sum: K too large for memo table");
  const VertexMask all = static_cast<VertexMask>((std::uint64_t{1} << K) - 1);
  std::vector<double> memo(std::size_t{all} + 1, std::numeric_limits<double>::quiet_NaN());
  memo[0] = 1.0;
  auto rec = [&](auto& self, VertexMask S) -> double {
    if (!std::isnan(memo[S])) return memo[S];
    const unsigned a = static_cast<unsigned>(std::countr_zero(S));
    const VertexMask rest = S & ~(VertexMask{1} << a);
    double total = 0.0;
    for (VertexMask r = rest; r; r &= r - 1) {
      const unsigned b = static_cast<unsigned>(std::countr_zero(r));
      const double w = weight(a, b);
      if (w == 0.0) continue;
      total += w * self(self, rest & ~(VertexMask{1} << b));
    }
    return memo[S] = total;
  };
  return rec(rec, all);
}

}  // namespace detail

/// Enumerates every diagram and sums I(G). With `collect_terms` the
/// individual diagrams are returned in canonical order.
inline TraversalResult wick_moment_traversal(const WickMomentSpec& spec, bool collect_terms = true,
                                             const EngineLimits& limits = {}) {
  TraversalResult result;
  const unsigned K = spec.total_degree();
  if (K % 2 == 1) return result;
  detail::check_vertex_cap(K, limits.max_vertices);

  const auto labeling = spec.labeling();
  const auto vf = spec.vertex_factors();
  const auto fns = detail::factor_functions(spec);
  std::unordered_map<VertexMask, double> block_sums;
  std::unordered_map<VertexMask, std::vector<Traversal>> traversals;
  auto block_sum = [&](VertexMask b) {
    auto it = block_sums.find(b);
    if (it == block_sums.end()) it = block_sums.emplace(b, detail::block_grid_sum(b, vf, fns)).first;
    return it->second;
  };
  auto block_traversals = [&](VertexMask b) -> const std::vector<Traversal>& {
    auto it = traversals.find(b);
    if (it == traversals.end()) it = traversals.emplace(b, enumerate_traversals(b)).first;
    return it->second;
  };

  detail::CompensatedSum total;
  for_each_even_partition(
      labeling, true,
      [&](const std::vector<VertexMask>& blocks) {
        std::uint64_t count = 1;
        for (VertexMask b : blocks) count *= detail::factorial_u64(std::popcount(b) - 1);
        if (result.diagram_count + count > limits.max_diagrams)
          throw CapacityError("wick_moment_traversal: more than " +
                              std::to_string(limits.max_diagrams) + " diagrams");

        std::vector<const std::vector<Traversal>*> lists;
        std::vector<double> sums;
        for (VertexMask b : blocks) {
          lists.push_back(&block_traversals(b));
          sums.push_back(block_sum(b));
        }
        std::vector<std::size_t> pick(blocks.size(), 0);
        for (bool done = false; !done;) {
          double value = 1.0;
          std::vector<double> block_values(blocks.size());
          for (std::size_t i = 0; i < blocks.size(); ++i) {
            block_values[i] = (*lists[i])[pick[i]].sign() * sums[i];
            value *= block_values[i];
          }
          total.add(value);
          ++result.diagram_count;
          if (collect_terms) {
            DiagramTerm term;
            term.diagram.partition.blocks = blocks;
            for (std::size_t i = 0; i < blocks.size(); ++i)
              term.diagram.traversals.push_back((*lists[i])[pick[i]]);
            term.block_values = std::move(block_values);
            term.value = value;
            result.terms.push_back(std::move(term));
          }
          // odometer over the per-block traversal choices, last block fastest
          for (std::size_t i = blocks.size();;) {
            if (i == 0) {
              done = true;
              break;
            }
            --i;
            if (++pick[i] < lists[i]->size()) break;
            pick[i] = 0;
          }
        }
      },
      limits.max_vertices);
  result.total = total.value();
  return result;
}

/// Same expectation with each block weighted by block_coefficient(|D|)
/// instead of enumerating traversals.
inline double wick_moment_closed(const WickMomentSpec& spec, const EngineLimits& limits = {}) {
  const unsigned K = spec.total_degree();
  if (K % 2 == 1) return 0.0;
  detail::check_vertex_cap(K, limits.max_vertices);
  const auto labeling = spec.labeling();
  const auto coeff = block_coefficient_table(K);
  const auto vf = spec.vertex_factors();
  const auto fns = detail::factor_functions(spec);
  return detail::even_partition_sum(K, [&](VertexMask block) {
    if (labeling.monochromatic(block)) return 0.0;
    return coeff[static_cast<std::size_t>(std::popcount(block))] *
           detail::block_grid_sum(block, vf, fns);
  });
}

/// Pathwise oracle: average over all 2^n sign vectors of prod_i P_{n_i}(phi(f_i)),
/// with each Wick polynomial built from brute-force moments.
inline double wick_moment_oracle(const WickMomentSpec& spec, const EngineLimits& limits = {}) {
  detail::check_oracle_n(spec.n(), limits, "wick_moment_oracle");
  std::vector<WickPolynomial> polys;
  for (const auto& fac : spec.factors())
    polys.push_back(wick_power_of_noise(fac.f, fac.power, MomentEngine::bruteforce, limits));
  return detail::average_over_signs(spec.n(), limits.workers,
                                    [&](std::span<const signed char> eps) {
                                      double prod = 1.0;
                                      for (std::size_t i = 0; i < polys.size(); ++i)
                                        prod *= polys[i](detail::phi_raw(
                                            spec.factors()[i].f.values(), eps));
                                      return prod;
                                    });
}

/// Gaussian Wick pairing: sum over perfect matchings with no pair inside one
/// factor of prod covariance(factor(a), factor(b)).
template <class Covariance>
double gaussian_wick_moment(std::span<const unsigned> powers, Covariance&& covariance,
                            const EngineLimits& limits = {}) {
  const auto labeling = VertexLabeling::from_counts(powers);
  const unsigned K = labeling.size();
  if (K % 2 == 1) return 0.0;
  detail::check_vertex_cap(K, limits.max_vertices);
  return detail::pair_partition_sum(K, [&](unsigned a, unsigned b) {
    const unsigned fa = labeling.multiplier_of(a + 1) - 1;
    const unsigned fb = labeling.multiplier_of(b + 1) - 1;
    return fa == fb ? 0.0 : covariance(fa, fb);
  });
}

/// Gaussian limit with same-grid Riemann sums standing in for <f_i, f_j>.
inline double gaussian_wick_moment(const WickMomentSpec& spec, const EngineLimits& limits = {}) {
  const auto& fs = spec.factors();
  const std::size_t N = fs.size();
  std::vector<double> cov(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) cov[i * N + j] = riemann_inner_product(fs[i].f, fs[j].f);
  const auto powers = spec.powers();
  return gaussian_wick_moment(
      powers, [&](unsigned a, unsigned b) { return cov[a * N + b]; }, limits);
}

enum class GaussianInnerProduct { same_grid, quadrature };

struct ConvergenceRow {
  std::size_t n = 0;
  double bernoulli = 0.0;
  double gaussian = 0.0;
  double abs_error = 0.0;
  double error_times_n = 0.0;
};

struct WickTemplateFactor {
  Expr expr;
  unsigned power = 1;
};

/// Tabulates wick_moment_closed against the Gaussian pairing value for each
/// grid size.
inline std::vector<ConvergenceRow> convergence_study(
    const std::vector<WickTemplateFactor>& spec_template, std::span<const std::size_t> n_values,
    GaussianInnerProduct inner = GaussianInnerProduct::same_grid,
    const EngineLimits& limits = {}) {
  if (spec_template.empty()) throw std::invalid_argument("convergence_study: empty template");
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1])
      throw std::invalid_argument("convergence_study: grid sizes must be ascending");

  std::vector<double> quad_cov;
  const std::size_t N = spec_template.size();
  if (inner == GaussianInnerProduct::quadrature) {
    quad_cov.resize(N * N);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        quad_cov[i * N + j] = quadrature_inner_product(spec_template[i].expr, spec_template[j].expr);
  }

  std::vector<ConvergenceRow> rows;
  for (std::size_t n : n_values) {
    std::vector<WickMomentSpec::Factor> factors;
    for (const auto& t : spec_template) factors.push_back({sample(t.expr, n), t.power});
    const WickMomentSpec spec(std::move(factors));
    ConvergenceRow row;
    row.n = n;
    row.bernoulli = wick_moment_closed(spec, limits);
    if (inner == GaussianInnerProduct::quadrature) {
      const auto powers = spec.powers();
      row.gaussian = gaussian_wick_moment(
          powers, [&](unsigned a, unsigned b) { return quad_cov[a * N + b]; }, limits);
    } else {
      row.gaussian = gaussian_wick_moment(spec, limits);
    }
    row.abs_error = std::fabs(row.bernoulli - row.gaussian);
    row.error_times_n = row.abs_error * static_cast<double>(n);
    rows.push_back(row);
  }
  return rows;
}

/// For every (partition, block) pair seen in `terms`, the sum of (-1)^{m-1}
/// over the distinct traversals of that block. Each entry should equal
/// block_coefficient(|block|).
inline std::map<std::pair<std::vector<VertexMask>, VertexMask>, long> traversal_sign_sums(
    const std::vector<DiagramTerm>& terms) {
  std::map<std::pair<std::vector<VertexMask>, VertexMask>, std::set<std::vector<unsigned>>> seen;
  std::map<std::pair<std::vector<VertexMask>, VertexMask>, long> sums;
  for (const auto& t : terms) {
    for (const auto& tr : t.diagram.traversals) {
      auto key = std::make_pair(t.diagram.partition.blocks, tr.block);
      if (seen[key].insert(tr.order).second) sums[key] += tr.sign();
    }
  }
  return sums;
}

}  // namespace wicklab

#endif  // WICKLAB_DIAGRAMS_HPP
