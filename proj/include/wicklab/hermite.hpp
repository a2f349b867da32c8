#ifndef WICKLAB_HERMITE_HPP
#define WICKLAB_HERMITE_HPP

// k-linear forms over Bernoulli signs
//
//   A_k^n(eps) = n^{-k/2} sum_{i_1, ..., i_k pairwise distinct} f(i_1/n, ..., i_k/n) eps_{i_1} ... eps_{i_k}
//
// and the Gaussian-chaos functionals f(xi, ..., xi) they approach.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "diagrams.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "grid.hpp"
#include "moments.hpp"

namespace wicklab {

namespace detail {
inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
inline std::function<void(const std::string&)>& warning_handler() {
  static std::function<void(const std::string&)> h = [](const std::string& msg) {
    std::cerr << "wicklab warning: " << msg << "\n";
  };
  return h;
}
}  // namespace detail

/// Replaces the sink for non-fatal warnings (default: stderr).
inline void set_warning_handler(std::function<void(const std::string&)> handler) {
  std::lock_guard lock(detail::warning_mutex());
  detail::warning_handler() = std::move(handler);
}

inline void warn(const std::string& msg) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_handler()) detail::warning_handler()(msg);
}

/// Probabilists' Hermite polynomial He_r, coefficients by ascending power.
inline std::vector<double> hermite_polynomial(unsigned r) {
  std::vector<double> prev{1.0};
  if (r == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (unsigned k = 1; k < r; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= static_cast<double>(k) * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// psi_1 = 1, psi_m = sqrt(2) cos((m - 1) pi x): orthonormal on [0, 1].
inline std::vector<Expr> cosine_basis(unsigned M) {
  std::vector<Expr> basis;
  basis.push_back(parse_expr("1"));
  for (unsigned m = 2; m <= M; ++m)
    basis.push_back(parse_expr("sqrt(2)*cos(" + std::to_string(m - 1) + "*pi*x)"));
  return basis;
}

/// f(x_1..x_k) = sum c_{m_1..m_k} psi_{m_1}(x_1) ... psi_{m_k}(x_k) over a
/// finite support; indices are 1-based into `basis`.
struct MultiIndexCoeffs {
  unsigned arity = 1;
  std::vector<Expr> basis;
  std::map<std::vector<unsigned>, double> coeffs;

  void validate() const {
    if (arity == 0) throw std::invalid_argument("MultiIndexCoeffs: arity must be positive");
    for (std::size_t a = 0; a < basis.size(); ++a) {
      if (basis[a].arity() != 1)
        throw std::invalid_argument("MultiIndexCoeffs: basis functions must be univariate");
      for (std::size_t b = 0; b < a; ++b)
        if (basis[a] == basis[b])
          throw std::invalid_argument("MultiIndexCoeffs: basis functions must be distinct");
    }
    for (const auto& [idx, c] : coeffs) {
      if (idx.size() != arity)
        throw std::invalid_argument("MultiIndexCoeffs: index tuple length must equal arity");
      for (unsigned m : idx)
        if (m == 0 || m > basis.size())
          throw std::invalid_argument("MultiIndexCoeffs: basis index out of range");
    }
  }

  /// f at a point, summing the expansion.
  double operator()(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& [idx, c] : coeffs) {
      double p = c;
      for (unsigned t = 0; t < arity; ++t) p *= basis[idx[t] - 1](x[t]);
      s += p;
    }
    return s;
  }
};

/// Symmetric Gram matrix of the basis.
struct GramMatrix {
  std::size_t size = 0;
  std::vector<double> entries;
  double operator()(std::size_t a, std::size_t b) const { return entries[a * size + b]; }
};

/// Gram matrix from riemann_inner_product at grid size n_ref.
inline GramMatrix gram_matrix(std::span<const Expr> basis, std::size_t n_ref = 4096) {
  GramMatrix g;
  g.size = basis.size();
  g.entries.resize(g.size * g.size);
  std::vector<GridFunction> grids;
  for (const auto& e : basis) grids.push_back(sample(e, n_ref));
  for (std::size_t a = 0; a < g.size; ++a)
    for (std::size_t b = 0; b <= a; ++b)
      g.entries[a * g.size + b] = g.entries[b * g.size + a] =
          riemann_inner_product(grids[a], grids[b]);
  return g;
}

/// Gram matrix from quadrature_inner_product (L^2 inner products).
inline GramMatrix gram_matrix_quadrature(std::span<const Expr> basis) {
  GramMatrix g;
  g.size = basis.size();
  g.entries.resize(g.size * g.size);
  for (std::size_t a = 0; a < g.size; ++a)
    for (std::size_t b = 0; b <= a; ++b)
      g.entries[a * g.size + b] = g.entries[b * g.size + a] =
          quadrature_inner_product(basis[a], basis[b]);
  return g;
}

inline GramMatrix identity_gram(std::size_t size) {
  GramMatrix g;
  g.size = size;
  g.entries.assign(size * size, 0.0);
  for (std::size_t a = 0; a < size; ++a) g.entries[a * size + a] = 1.0;
  return g;
}

namespace detail {

struct SetPartitionTerm {
  std::vector<std::uint32_t> blocks;
  double mobius = 1.0;  // prod_B (-1)^{|B|-1} (|B|-1)!
};

/// All set partitions of {0..k-1} with their Moebius weights relative to the
/// all-singletons partition.
inline std::vector<SetPartitionTerm> set_partitions_with_mobius(unsigned k) {
  std::vector<SetPartitionTerm> out;
  std::vector<unsigned> rgs(k, 0);  // restricted growth string
  auto emit = [&] {
    unsigned blocks = 0;
    for (unsigned v : rgs) blocks = std::max(blocks, v + 1);
    SetPartitionTerm t;
    t.blocks.assign(blocks, 0);
    for (unsigned i = 0; i < k; ++i) t.blocks[rgs[i]] |= std::uint32_t{1} << i;
    for (auto b : t.blocks) {
      const int s = std::popcount(b);
      double w = (s % 2 == 1) ? 1.0 : -1.0;
      for (int j = 2; j < s; ++j) w *= j;
      t.mobius *= w;
    }
    out.push_back(std::move(t));
  };
  auto rec = [&](auto& self, unsigned pos, unsigned max_used) -> void {
    if (pos == k) {
      emit();
      return;
    }
    for (unsigned v = 0; v <= max_used + 1; ++v) {
      rgs[pos] = v;
      self(self, pos + 1, std::max(max_used, v));
    }
  };
  if (k == 0) return {SetPartitionTerm{}};
  rgs[0] = 0;
  rec(rec, 1, 0);
  return out;
}

}  // namespace detail

/// A_k^n for a fixed kernel. Holds either an arbitrary arity-k grid or a
/// finite basis expansion (product form), which evaluates much faster.
class KForm {
 public:
  static KForm from_grid(GridFunction f) {
    KForm form;
    form.k_ = f.arity();
    form.n_ = f.n();
    form.grid_ = std::move(f);
    form.check_order();
    return form;
  }

  static KForm from_coeffs(const MultiIndexCoeffs& coeffs, std::size_t n) {
    coeffs.validate();
    KForm form;
    form.k_ = coeffs.arity;
    form.n_ = n;
    for (const auto& e : coeffs.basis) form.basis_.push_back(sample(e, n));
    for (const auto& [idx, c] : coeffs.coeffs) {
      if (c == 0.0) continue;
      Monomial m;
      m.coeff = c;
      for (unsigned i : idx) m.basis.push_back(i - 1);
      form.monomials_.push_back(std::move(m));
    }
    if (form.k_ > 12) throw CapacityError("KForm: product form supports k <= 12");
    form.partitions_ = detail::set_partitions_with_mobius(form.k_);
    form.check_order();
    return form;
  }

  unsigned k() const noexcept { return k_; }
  std::size_t n() const noexcept { return n_; }
  bool product_form() const noexcept { return !grid_.has_value(); }
  /// True when k > n, so the distinct-index sum has no terms.
  bool empty() const noexcept { return k_ > n_; }

  /// The kernel on the grid {1/n..1}^k.
  GridFunction materialize() const {
    if (grid_) return *grid_;
    const std::size_t total = GridFunction::grid_points(n_, k_);
    std::vector<double> values(total, 0.0);
    std::vector<std::size_t> idx(k_, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      double s = 0.0;
      for (const auto& m : monomials_) {
        double p = m.coeff;
        for (unsigned t = 0; t < k_; ++t) p *= basis_[m.basis[t]][idx[t]];
        s += p;
      }
      values[flat] = s;
      for (unsigned a = k_; a-- > 0;) {
        if (++idx[a] < n_) break;
        idx[a] = 0;
      }
    }
    return GridFunction::from_values(n_, k_, std::move(values));
  }

  /// Direct distinct-index sum, O(n^k).
  double eval_direct(std::span<const signed char> eps) const {
    if (empty()) return 0.0;
    const GridFunction f = grid_ ? *grid_ : materialize();
    if (k_ == 1) return detail::phi_raw(f.values(), eps);
    std::vector<char> used(n_, 0);
    auto rec = [&](auto& self, unsigned level, std::size_t flat, double sign) -> double {
      if (level == k_) return sign * f[flat];
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (used[i]) continue;
        used[i] = 1;
        s += self(self, level + 1, flat * n_ + i, sign * eps[i]);
        used[i] = 0;
      }
      return s;
    };
    return rec(rec, 0, 0, 1.0) * grid_scale(n_, k_);
  }

  /// Product form: for each monomial, the distinct-index sum of
  /// prod_t psi_{m_t}(i_t) eps_{i_t} is expanded over set partitions of the
  /// k slots (Moebius inversion), so only full sums over one index remain.
  double eval_product(std::span<const signed char> eps) const {
    if (empty()) return 0.0;
    const std::uint32_t subsets = std::uint32_t{1} << k_;
    std::vector<double> block_sum(subsets);
    double total = 0.0;
    for (const auto& m : monomials_) {
      for (std::uint32_t B = 1; B < subsets; ++B) {
        const bool odd = std::popcount(B) % 2 == 1;
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
          double p = odd ? static_cast<double>(eps[i]) : 1.0;
          for (std::uint32_t b = B; b; b &= b - 1)
            p *= basis_[m.basis[static_cast<unsigned>(std::countr_zero(b))]][i];
          s += p;
        }
        block_sum[B] = s;
      }
      double distinct = 0.0;
      for (const auto& part : partitions_) {
        double p = part.mobius;
        for (auto b : part.blocks) p *= block_sum[b];
        distinct += p;
      }
      total += m.coeff * distinct;
    }
    return total * grid_scale(n_, k_);
  }

  double eval(std::span<const signed char> eps) const {
    if (eps.size() != n_)
      throw std::invalid_argument("kform_eval: sign vector length " + std::to_string(eps.size()) +
                                  " but n = " + std::to_string(n_));
    return grid_ ? eval_direct(eps) : eval_product(eps);
  }

 private:
  struct Monomial {
    double coeff = 0.0;
    std::vector<unsigned> basis;  // 0-based
  };

  void check_order() const {
    if (k_ > n_)
      warn("A_k^n with k = " + std::to_string(k_) + " > n = " + std::to_string(n_) +
           " has no distinct index tuples; it is identically 0");
  }

  unsigned k_ = 1;
  std::size_t n_ = 0;
  std::optional<GridFunction> grid_;
  std::vector<GridFunction> basis_;
  std::vector<Monomial> monomials_;
  std::vector<detail::SetPartitionTerm> partitions_;
};

inline double kform_eval(const KForm& form, const SignVector& eps) { return form.eval(eps.signs()); }

inline double kform_eval_direct(const KForm& form, const SignVector& eps) {
  if (eps.size() != form.n()) throw std::invalid_argument("kform_eval_direct: length mismatch");
  return form.eval_direct(eps.signs());
}

/// Exact E[A_k A_m] over all 2^n sign vectors.
inline double kform_orthogonality_check(const KForm& a, const KForm& b,
                                        const EngineLimits& limits = {}) {
  if (a.n() != b.n()) throw std::invalid_argument("kform_orthogonality_check: different n");
  detail::check_oracle_n(a.n(), limits, "kform_orthogonality_check");
  return detail::average_over_signs(a.n(), limits.workers, [&](std::span<const signed char> eps) {
    return a.eval(eps) * b.eval(eps);
  });
}

/// Exact E[A_k] over all 2^n sign vectors.
inline double kform_mean_exact(const KForm& a, const EngineLimits& limits = {}) {
  detail::check_oracle_n(a.n(), limits, "kform_mean_exact");
  return detail::average_over_signs(a.n(), limits.workers,
                                    [&](std::span<const signed char> eps) { return a.eval(eps); });
}

/// Closed-form E[(A_k^n)^2] = n^{-k} sum_{distinct i} f(i) sum_{sigma in S_k} f(i o sigma).
inline double kform_second_moment_exact(const KForm& form) {
  if (form.empty()) return 0.0;
  const unsigned k = form.k();
  const std::size_t n = form.n();
  const GridFunction f = form.materialize();
  std::vector<std::vector<unsigned>> perms;
  std::vector<unsigned> p(k);
  for (unsigned i = 0; i < k; ++i) p[i] = i;
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  std::vector<std::size_t> tuple(k);
  std::vector<char> used(n, 0);
  detail::CompensatedSum acc;
  auto flat_of = [&](const std::vector<unsigned>& perm) {
    std::size_t flat = 0;
    for (unsigned t = 0; t < k; ++t) flat = flat * n + tuple[perm[t]];
    return flat;
  };
  auto rec = [&](auto& self, unsigned level) -> void {
    if (level == k) {
      const double base = f[flat_of(perms[0])];
      if (base == 0.0) return;
      double sym = 0.0;
      for (const auto& perm : perms) sym += f[flat_of(perm)];
      acc.add(base * sym);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      tuple[level] = i;
      self(self, level + 1);
      used[i] = 0;
    }
  };
  rec(rec, 0);
  const double scale = grid_scale(n, k);
  return acc.value() * scale * scale;
}

/// E[prod_j F_j^{p_j}] for Gaussian-chaos functionals F_j = f_j(xi, ..., xi).
///
/// Each F_j is a sum of Wick monomials c (psi_{m_1}, xi) * ... * (psi_{m_k}, xi).
/// The product is expanded monomial by monomial; each expanded product is
/// evaluated by Gaussian pairing with covariances from `gram`, never pairing
/// two vertices of the same Wick monomial.
inline double hermite_functional_moment(std::span<const MultiIndexCoeffs> functionals,
                                        std::span<const unsigned> powers, const GramMatrix& gram,
                                        const EngineLimits& limits = {}) {
  if (functionals.size() != powers.size())
    throw std::invalid_argument("hermite_functional_moment: one power per functional required");

  struct Slot {
    const MultiIndexCoeffs* f;
  };
  std::vector<Slot> slots;
  unsigned K = 0;
  std::uint64_t expanded = 1;
  for (std::size_t j = 0; j < functionals.size(); ++j) {
    functionals[j].validate();
    if (functionals[j].basis.size() > gram.size)
      throw std::invalid_argument("hermite_functional_moment: Gram matrix smaller than basis");
    for (unsigned r = 0; r < powers[j]; ++r) {
      slots.push_back({&functionals[j]});
      K += functionals[j].arity;
      expanded *= std::max<std::size_t>(1, functionals[j].coeffs.size());
      if (expanded > limits.max_expanded_terms)
        throw CapacityError("hermite_functional_moment: more than " +
                            std::to_string(limits.max_expanded_terms) + " expanded terms");
    }
  }
  if (slots.empty()) return 1.0;
  for (const auto& s : slots)
    if (s.f->coeffs.empty()) return 0.0;
  if (K % 2 == 1) return 0.0;
  detail::check_vertex_cap(K, limits.max_vertices);

  using Iter = std::map<std::vector<unsigned>, double>::const_iterator;
  std::vector<Iter> pick;
  for (const auto& s : slots) pick.push_back(s.f->coeffs.begin());

  std::vector<unsigned> vertex_basis(K), vertex_slot(K);
  detail::CompensatedSum total;
  for (;;) {
    double coeff = 1.0;
    unsigned v = 0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      coeff *= pick[s]->second;
      for (unsigned m : pick[s]->first) {
        vertex_basis[v] = m - 1;
        vertex_slot[v] = static_cast<unsigned>(s);
        ++v;
      }
    }
    if (coeff != 0.0) {
      const double pairing = detail::pair_partition_sum(K, [&](unsigned a, unsigned b) {
        return vertex_slot[a] == vertex_slot[b] ? 0.0 : gram(vertex_basis[a], vertex_basis[b]);
      });
      total.add(coeff * pairing);
    }
    std::size_t s = slots.size();
    for (;;) {
      if (s == 0) return total.value();
      --s;
      if (++pick[s] != slots[s].f->coeffs.end()) break;
      pick[s] = slots[s].f->coeffs.begin();
    }
  }
}

inline double hermite_functional_moment(const MultiIndexCoeffs& f, unsigned power,
                                        const GramMatrix& gram, const EngineLimits& limits = {}) {
  return hermite_functional_moment(std::span<const MultiIndexCoeffs>(&f, 1),
                                   std::span<const unsigned>(&power, 1), gram, limits);
}

struct KFormLimitOptions {
  /// Moments are exact (2^n enumeration) up to this n, Monte Carlo beyond.
  unsigned exact_max_n = 16;
  /// Inner products for the limit functional: quadrature, or Riemann sums
  /// at grid size gram_n.
  bool quadrature_gram = false;
  std::size_t gram_n = 4096;
};

struct KFormLimitRow {
  std::size_t n = 0;
  bool exact = false;
  double mean = 0.0, mean_se = 0.0;
  double second = 0.0, second_se = 0.0;
  double third = 0.0, third_se = 0.0;
  /// Closed-form E[(A_k^n)^2], available at every n.
  double second_exact = 0.0;
  double limit_second = 0.0, limit_third = 0.0;
  double gap_second = 0.0;  // |second_exact - limit_second|
  double gap_third = 0.0;   // |third - limit_third|
};

/// Compares the first three moments of A_k^n with those of f(xi, ..., xi).
inline std::vector<KFormLimitRow> kform_limit_check(const MultiIndexCoeffs& coeffs,
                                                    std::span<const std::size_t> n_values,
                                                    const McConfig& mc,
                                                    const KFormLimitOptions& options = {},
                                                    const EngineLimits& limits = {}) {
  coeffs.validate();
  const GramMatrix gram = options.quadrature_gram ? gram_matrix_quadrature(coeffs.basis)
                                                  : gram_matrix(coeffs.basis, options.gram_n);
  const double limit_second = hermite_functional_moment(coeffs, 2, gram, limits);
  const double limit_third = hermite_functional_moment(coeffs, 3, gram, limits);

  std::vector<KFormLimitRow> rows;
  for (std::size_t n : n_values) {
    const KForm form = KForm::from_coeffs(coeffs, n);
    KFormLimitRow row;
    row.n = n;
    row.limit_second = limit_second;
    row.limit_third = limit_third;
    row.second_exact = kform_second_moment_exact(form);
    if (n <= options.exact_max_n && n <= limits.oracle_max_n) {
      row.exact = true;
      auto avg = [&](unsigned p) {
        return detail::average_over_signs(n, limits.workers, [&](std::span<const signed char> e) {
          return detail::ipow(form.eval(e), p);
        });
      };
      row.mean = avg(1);
      row.second = avg(2);
      row.third = avg(3);
    } else {
      auto est = [&](unsigned p) {
        return detail::monte_carlo(n, mc, limits.workers, [&](std::span<const signed char> e) {
          return detail::ipow(form.eval(e), p);
        });
      };
      const auto m1 = est(1), m2 = est(2), m3 = est(3);
      row.mean = m1.estimate;
      row.mean_se = m1.std_error;
      row.second = m2.estimate;
      row.second_se = m2.std_error;
      row.third = m3.estimate;
      row.third_se = m3.std_error;
    }
    row.gap_second = std::fabs(row.second_exact - limit_second);
    row.gap_third = std::fabs(row.third - limit_third);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wicklab

#endif  // WICKLAB_HERMITE_HPP
