#ifndef WICKLAB_NUMBERS_HPP
#define WICKLAB_NUMBERS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wicklab {

using BigInt = boost::multiprecision::cpp_int;
/// Always kept in lowest terms with a positive denominator; zero is 0/1.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

/// B_0 .. B_m from sum_{j=0}^{k} C(k+1, j) B_j = 0, convention B_1 = -1/2.
inline std::vector<Rational> bernoulli_numbers(unsigned m) {
  std::vector<Rational> b(m + 1);
  b[0] = 1;
  for (unsigned k = 1; k <= m; ++k) {
    if (k >= 3 && k % 2 == 1) {
      b[k] = 0;
      continue;
    }
    Rational acc = 0;
    for (unsigned j = 0; j < k; ++j) acc += Rational(binomial(k + 1, j)) * b[j];
    b[k] = -acc / Rational(k + 1);
  }
  return b;
}

inline Rational bernoulli_number(unsigned m) { return bernoulli_numbers(m).back(); }

/// Row n of the Eulerian triangle: entry l counts permutations of n
/// elements with exactly l ascents. Row 0 is {1}; row n >= 1 has n entries.
inline std::vector<BigInt> eulerian_row(unsigned n) {
  std::vector<BigInt> row{1};
  for (unsigned r = 1; r <= n; ++r) {
    std::vector<BigInt> next(r, 0);
    for (unsigned l = 0; l < r; ++l) {
      if (l < row.size()) next[l] += BigInt(l + 1) * row[l];
      if (l >= 1 && l - 1 < row.size()) next[l] += BigInt(r - l) * row[l - 1];
    }
    row = std::move(next);
  }
  return row;
}

inline BigInt eulerian_number(unsigned n, unsigned l) {
  const auto row = eulerian_row(n);
  return l < row.size() ? row[l] : BigInt(0);
}

namespace detail {
inline void require_even_block(unsigned size, const char* who) {
  if (size == 0 || size % 2 != 0)
    throw std::invalid_argument(std::string(who) +
                                ": block size must be even and positive, got " +
                                std::to_string(size));
}
}  // namespace detail

/// Weight of a size-2p block: (-1)^{p+1} |B_{2p}| 2^{2p} (2^{2p} - 1) / (2p).
/// These are the cumulants of a symmetric +-1 variable (1, -2, 16, -272, ...).
inline Rational block_coefficient(unsigned size) {
  detail::require_even_block(size, "block_coefficient");
  const unsigned p = size / 2;
  const Rational b = abs(bernoulli_number(size));
  const BigInt pow2 = BigInt(1) << size;
  Rational c = b * Rational(pow2) * Rational(pow2 - 1) / Rational(size);
  return p % 2 == 1 ? c : Rational(-c);
}

/// sum_{l=0}^{size-1} (-1)^l E(size-1, l).
inline Rational alternating_eulerian_sum(unsigned block_size) {
  detail::require_even_block(block_size, "alternating_eulerian_sum");
  const auto row = eulerian_row(block_size - 1);
  BigInt acc = 0;
  for (std::size_t l = 0; l < row.size(); ++l) acc += (l % 2 == 0) ? row[l] : BigInt(-row[l]);
  return Rational(acc);
}

struct BlockCoefficient {
  unsigned block_size;
  Rational value;
};

/// Doubles c_s for s = 0..max_size; odd and zero sizes map to 0.
inline std::vector<double> block_coefficient_table(unsigned max_size) {
  std::vector<double> t(max_size + 1, 0.0);
  for (unsigned s = 2; s <= max_size; s += 2) t[s] = to_double(block_coefficient(s));
  return t;
}

}  // namespace wicklab

#endif  // WICKLAB_NUMBERS_HPP
