#ifndef WICKLAB_STATS_HPP
#define WICKLAB_STATS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wicklab {

inline double normal_cdf(double x, double variance) {
  if (variance <= 0.0) return x < 0.0 ? 0.0 : 1.0;
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

/// sup_x |F_empirical(x) - Phi(x / sigma)|, ties handled exactly.
inline double ks_distance_normal(std::vector<double> samples, double variance) {
  if (samples.empty()) throw std::invalid_argument("ks_distance_normal: no samples");
  std::sort(samples.begin(), samples.end());
  const double N = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = normal_cdf(samples[i], variance);
    d = std::max({d, static_cast<double>(i + 1) / N - F, F - static_cast<double>(i) / N});
  }
  return d;
}

/// 2x2 covariance, row-major.
struct Covariance2 {
  double xx = 1.0, xy = 0.0, yy = 1.0;
};

/// max over a square grid of t in [-t_max, t_max]^2 of
/// |mean exp(i t.X) - exp(-t' C t / 2)|.
inline double cf_distance_2d(std::span<const std::pair<double, double>> samples,
                             const Covariance2& cov, double t_max = 3.0, unsigned steps = 13) {
  if (samples.empty()) throw std::invalid_argument("cf_distance_2d: no samples");
  if (steps < 2) steps = 2;
  const double h = 2.0 * t_max / static_cast<double>(steps - 1);
  double worst = 0.0;
  for (unsigned a = 0; a < steps; ++a) {
    const double t1 = -t_max + h * a;
    for (unsigned b = 0; b < steps; ++b) {
      const double t2 = -t_max + h * b;
      double re = 0.0, im = 0.0;
      for (const auto& [x, y] : samples) {
        const double arg = t1 * x + t2 * y;
        re += std::cos(arg);
        im += std::sin(arg);
      }
      re /= static_cast<double>(samples.size());
      im /= static_cast<double>(samples.size());
      const double q = t1 * t1 * cov.xx + 2.0 * t1 * t2 * cov.xy + t2 * t2 * cov.yy;
      const double target = std::exp(-0.5 * q);
      worst = std::max(worst, std::hypot(re - target, im));
    }
  }
  return worst;
}

}  // namespace wicklab

#endif  // WICKLAB_STATS_HPP
