#ifndef WICKLAB_GRID_HPP
#define WICKLAB_GRID_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "expr.hpp"

namespace wicklab {

/// Samples of f on the grid {1/n, 2/n, ..., 1}^arity, row-major (x1 varies
/// slowest). The k = 0 node is never part of the grid.
class GridFunction {
 public:
  GridFunction() = default;

  static GridFunction from_values(std::size_t n, unsigned arity, std::vector<double> values) {
    if (n == 0) throw std::invalid_argument("GridFunction: n must be positive");
    if (arity == 0) throw std::invalid_argument("GridFunction: arity must be positive");
    if (values.size() != grid_points(n, arity))
      throw std::invalid_argument("GridFunction: expected " +
                                  std::to_string(grid_points(n, arity)) + " values, got " +
                                  std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i]))
        throw NumericError("GridFunction: non-finite value at flat index " + std::to_string(i));
    GridFunction g;
    g.n_ = n;
    g.arity_ = arity;
    g.values_ = std::move(values);
    return g;
  }

  static GridFunction constant(std::size_t n, double value, unsigned arity = 1) {
    return from_values(n, arity, std::vector<double>(grid_points(n, arity), value));
  }

  static std::size_t grid_points(std::size_t n, unsigned arity) {
    std::size_t total = 1;
    for (unsigned a = 0; a < arity; ++a) {
      if (total > std::numeric_limits<std::size_t>::max() / n)
        throw CapacityError("GridFunction: n^arity overflows");
      total *= n;
    }
    return total;
  }

  std::size_t n() const noexcept { return n_; }
  unsigned arity() const noexcept { return arity_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Value at grid node i/n (1-based), arity 1 only.
  double at(std::size_t i) const { return values_.at(i - 1); }
  double operator[](std::size_t flat) const noexcept { return values_[flat]; }

  bool operator==(const GridFunction&) const = default;

 private:
  std::size_t n_ = 0;
  unsigned arity_ = 0;
  std::vector<double> values_;
};

inline GridFunction sample(const Expr& expr, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample: n must be positive");
  const unsigned k = expr.arity();
  const std::size_t total = GridFunction::grid_points(n, k);
  std::vector<double> values(total);
  std::vector<std::size_t> idx(k, 1);
  std::vector<double> x(k);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (unsigned a = 0; a < k; ++a) x[a] = static_cast<double>(idx[a]) / static_cast<double>(n);
    const double v = expr(x);
    if (!std::isfinite(v)) {
      std::string where;
      for (unsigned a = 0; a < k; ++a) where += (a ? "," : "") + std::to_string(idx[a]);
      throw NumericError("sample: non-finite value at grid index (" + where + ")");
    }
    values[flat] = v;
    for (unsigned a = k; a-- > 0;) {
      if (++idx[a] <= n) break;
      idx[a] = 1;
    }
  }
  return GridFunction::from_values(n, k, std::move(values));
}

/// n^{-L/2}. Even L uses an exact reciprocal so L = 2 matches a plain 1/n.
inline double grid_scale(std::size_t n, std::size_t factors) {
  const double dn = static_cast<double>(n);
  double denom = 1.0;
  for (std::size_t i = 0; i < factors / 2; ++i) denom *= dn;
  if (factors % 2 == 1) denom *= std::sqrt(dn);
  return 1.0 / denom;
}

namespace detail {
inline void require_univariate(const GridFunction& f, const char* who) {
  if (f.arity() != 1) throw std::invalid_argument(std::string(who) + ": arity-1 grid required");
}
inline void require_same_n(const GridFunction& a, const GridFunction& b, const char* who) {
  if (a.n() != b.n())
    throw std::invalid_argument(std::string(who) + ": mismatched grid sizes " +
                                std::to_string(a.n()) + " and " + std::to_string(b.n()));
}
}  // namespace detail

/// sum_k prod_d f_d(k/n) * n^{-L/2} over the L given factors.
inline double weighted_grid_sum(std::span<const GridFunction* const> factors) {
  if (factors.empty()) throw std::invalid_argument("weighted_grid_sum: no factors");
  for (const GridFunction* f : factors) {
    detail::require_univariate(*f, "weighted_grid_sum");
    detail::require_same_n(*factors[0], *f, "weighted_grid_sum");
  }
  const std::size_t n = factors[0]->n();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double prod = (*factors[0])[k];
    for (std::size_t d = 1; d < factors.size(); ++d) prod *= (*factors[d])[k];
    sum += prod;
  }
  return sum * grid_scale(n, factors.size());
}

inline double weighted_grid_sum(std::initializer_list<const GridFunction*> factors) {
  return weighted_grid_sum(std::span<const GridFunction* const>(factors.begin(), factors.size()));
}

/// sum_k f(k/n) g(k/n) / n.
inline double riemann_inner_product(const GridFunction& f, const GridFunction& g) {
  detail::require_univariate(f, "riemann_inner_product");
  detail::require_univariate(g, "riemann_inner_product");
  detail::require_same_n(f, g, "riemann_inner_product");
  double sum = 0.0;
  for (std::size_t k = 0; k < f.n(); ++k) sum += f[k] * g[k];
  return sum * grid_scale(f.n(), 2);
}

/// int_0^1 f g by adaptive Gauss-Kronrod (61 points).
inline double quadrature_inner_product(const Expr& f, const Expr& g) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate([&](double x) { return f(x) * g(x); }, 0.0, 1.0, 15, 1e-14);
}

// CSV layout:
//   n,arity
//   <n>,<arity>
//   <value>          one per line, row-major
inline void write_csv(std::ostream& out, const GridFunction& g) {
  out << "n,arity\n" << g.n() << "," << g.arity() << "\n";
  for (double v : g.values()) out << detail::format_number(v) << "\n";
}

inline GridFunction read_grid_csv(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw std::runtime_error("grid CSV: empty input");
  if (line == "n,arity" && !next_line()) throw std::runtime_error("grid CSV: missing size line");
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw std::runtime_error("grid CSV: bad size line '" + line + "'");
  std::size_t n = 0;
  unsigned arity = 0;
  try {
    n = std::stoul(line.substr(0, comma));
    arity = static_cast<unsigned>(std::stoul(line.substr(comma + 1)));
  } catch (const std::exception&) {
    throw std::runtime_error("grid CSV: bad size line '" + line + "'");
  }
  std::vector<double> values;
  while (next_line()) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      throw std::runtime_error("grid CSV: bad value '" + line + "'");
    }
    values.push_back(v);
  }
  return GridFunction::from_values(n, arity, std::move(values));
}

}  // namespace wicklab

#endif  // WICKLAB_GRID_HPP
