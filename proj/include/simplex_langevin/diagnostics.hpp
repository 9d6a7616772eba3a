#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "simplex_langevin/geometry.hpp"
#include "simplex_langevin/rng.hpp"
#include "simplex_langevin/simplex.hpp"

namespace simplex_langevin {

/// Empirical moments of the Langevin noise at one point against the
/// analytic drift (mean) and 2 eps x_i / beta (variance).
struct NoiseMomentReport {
  struct Coord {
    double x = 0.0;
    double drift = 0.0;
    double mean = 0.0;
    double mean_z = 0.0;
    double expected_var = 0.0;
    double var = 0.0;
    double var_z = 0.0;
  };
  std::size_t samples = 0;
  std::vector<Coord> coords;

  double max_abs_z() const {
    double m = 0.0;
    for (const auto& c : coords) m = std::max({m, std::abs(c.mean_z), std::abs(c.var_z)});
    return m;
  }
};

namespace detail {
inline double z_score(double diff, double se) {
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}
}  // namespace detail

/// Draws `samples` noise vectors at x. Moments are accumulated on
/// values - drift so tiny variances are not lost to cancellation.
/// Standard errors: s / sqrt(N) for the mean, sqrt((m4 - s^4) / N) for the
/// variance.
template <GaussianSource G>
NoiseMomentReport noise_moments(const SimplexPoint& x, double eps, double beta,
                                std::size_t samples, G& gauss, double floor = kDefaultFloor) {
  const std::size_t n = x.dim();
  std::vector<double> drift = christoffel_drift(x, eps, beta, floor);
  std::vector<double> s1(n, 0.0), s2(n, 0.0);
  std::vector<std::vector<double>> dev(n, std::vector<double>(samples));
  for (std::size_t k = 0; k < samples; ++k) {
    const NoiseDraw d = sample_noise(x, eps, beta, gauss, floor);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = d.values[i] - drift[i];
      dev[i][k] = c;
      s1[i] += c;
    }
  }
  NoiseMomentReport rep;
  rep.samples = samples;
  const double N = static_cast<double>(samples);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = s1[i] / N;
    double m2 = 0.0, m4 = 0.0;
    for (double c : dev[i]) {
      const double e = (c - m) * (c - m);
      m2 += e;
      m4 += e * e;
    }
    m2 /= N;
    m4 /= N;
    NoiseMomentReport::Coord c;
    c.x = x[i];
    c.drift = drift[i];
    c.mean = drift[i] + m;
    c.mean_z = detail::z_score(m, std::sqrt(m2 / N));
    c.expected_var = 2.0 * eps * x[i] / beta;
    c.var = m2;
    c.var_z = detail::z_score(m2 - c.expected_var, std::sqrt(std::max(m4 - m2 * m2, 0.0) / N));
    rep.coords.push_back(c);
  }
  return rep;
}

}  // namespace simplex_langevin
