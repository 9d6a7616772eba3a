#pragma once

// Shahshahani geometry of the open simplex: metric-scaled gradients, the
// exponential/log map pair, distance from the barycenter, the Christoffel
// drift of Riemannian Brownian motion and the two retractions used by the
// optimizers (normalization and Euclidean projection).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "simplex_langevin/errors.hpp"
#include "simplex_langevin/rng.hpp"
#include "simplex_langevin/simplex.hpp"

namespace simplex_langevin {

/// Riemannian gradient under the Shahshahani metric: component i is
/// x_i * df/dx_i (the |x| normalization is 1 on the simplex).
inline std::vector<double> shahshahani_gradient(const SimplexPoint& x,
                                                std::span<const double> euclid_grad) {
  detail::require_same_dim(x.dim(), euclid_grad.size(), "shahshahani_gradient");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = x[i] * euclid_grad[i];
  return out;
}

namespace detail {

inline RetractionResult exp_map_impl(const SimplexPoint& x, std::span<const double> v,
                                     double floor) {
  require_same_dim(x.dim(), v.size(), "exp_map");
  const double vmax = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(vmax)) throw InvalidArgument("exp_map: tangent vector must be finite");
  std::vector<double> p(x.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(v[i])) throw InvalidArgument("exp_map: tangent vector must be finite");
    p[i] = x[i] * std::exp(v[i] - vmax);
    sum += p[i];
  }
  for (double& c : p) c /= sum;
  const bool clamped = clamp_to_floor(p, floor);
  return {SimplexPoint(std::move(p)), clamped};
}

}  // namespace detail

/// Exp_x(v)_i = x_i e^{v_i} / sum_j x_j e^{v_j}. Invariant under v -> v + c*1,
/// so `v` need not be tangent. Coordinates that underflow are lifted to `floor`.
inline SimplexPoint exp_map(const SimplexPoint& x, std::span<const double> v,
                            double floor = kDefaultFloor) {
  return detail::exp_map_impl(x, v, floor).point;
}

/// Inverse of exp_map, centered onto the tangent space:
/// v_i = ln(y_i/x_i) - mean_j ln(y_j/x_j).
inline TangentVector log_map(const SimplexPoint& x, const SimplexPoint& y) {
  detail::require_same_dim(x.dim(), y.dim(), "log_map");
  std::vector<double> v(x.dim());
  double mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::log(y[i] / x[i]);
    mean += v[i];
  }
  mean /= static_cast<double>(v.size());
  for (double& c : v) c -= mean;
  return TangentVector(x, std::move(v));
}

/// Squared Shahshahani distance from the barycenter, n * sum_i ln(n x_i)^2.
/// Terms are summed in sorted order so the result is exactly
/// permutation-invariant.
inline double distance_sq_barycenter(const SimplexPoint& x) {
  const double n = static_cast<double>(x.dim());
  std::vector<double> terms(x.dim());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double l = std::log(n * x[i]);
    terms[i] = l * l;
  }
  std::sort(terms.begin(), terms.end());
  return n * std::accumulate(terms.begin(), terms.end(), 0.0);
}

/// Christoffel drift of the Langevin step,
/// D_i = (eps / 2 beta) (n + 1 - (1 + x_i) S_x),  S_x = sum_j 1/x_j.
inline std::vector<double> christoffel_drift(const SimplexPoint& x, double eps, double beta,
                                             double floor = kDefaultFloor) {
  if (!(eps > 0.0)) throw InvalidArgument("christoffel_drift: eps must be > 0");
  if (!(beta > 0.0)) throw InvalidArgument("christoffel_drift: beta must be > 0");
  double inv_sum = 0.0;
  for (double c : x.coords()) {
    if (c < floor) {
      throw DegeneratePoint("christoffel_drift: coordinate below positivity floor");
    }
    inv_sum += 1.0 / c;
  }
  const double n = static_cast<double>(x.dim());
  const double scale = eps / (2.0 * beta);
  std::vector<double> drift(x.dim());
  for (std::size_t i = 0; i < drift.size(); ++i) {
    drift[i] = scale * (n + 1.0 - (1.0 + x[i]) * inv_sum);
  }
  return drift;
}

/// One draw V_i = D_i + sqrt(2 eps x_i / beta) z_i with z_i ~ N(0,1) taken
/// from `gauss` in coordinate order.
template <GaussianSource G>
NoiseDraw sample_noise(const SimplexPoint& x, double eps, double beta, G& gauss,
                       double floor = kDefaultFloor) {
  NoiseDraw draw;
  draw.drift_part = christoffel_drift(x, eps, beta, floor);
  draw.gauss_part.resize(x.dim());
  draw.values.resize(x.dim());
  const double var_scale = 2.0 * eps / beta;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double z = gauss.normal();
    draw.gauss_part[i] = std::sqrt(var_scale * x[i]) * z;
    draw.values[i] = draw.drift_part[i] + draw.gauss_part[i];
  }
  return draw;
}

/// Retraction by normalization: divide by the component sum, then lift any
/// coordinate below `floor`.
inline RetractionResult normalize_retraction(std::span<const double> raw,
                                             double floor = kDefaultFloor) {
  if (raw.size() < 2) throw InvalidArgument("normalize_retraction: dimension must be >= 2");
  double sum = 0.0;
  for (double c : raw) {
    if (!std::isfinite(c)) throw RetractionFailure("normalize_retraction: non-finite component");
    sum += c;
  }
  if (!(sum > floor)) {
    throw RetractionFailure("normalize_retraction: component sum is not above the floor");
  }
  std::vector<double> p(raw.begin(), raw.end());
  for (double& c : p) c /= sum;
  const bool clamped = detail::clamp_to_floor(p, floor);
  return {SimplexPoint(std::move(p)), clamped};
}

/// Exact Euclidean projection onto the closed simplex (sorted-threshold
/// algorithm). Output may contain zeros.
inline std::vector<double> euclidean_simplex_projection(std::span<const double> y) {
  if (y.empty()) throw InvalidArgument("euclidean_simplex_projection: empty input");
  for (double c : y) {
    if (!std::isfinite(c)) throw InvalidArgument("euclidean_simplex_projection: non-finite input");
  }
  std::vector<double> u(y.begin(), y.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::max(y[i] - theta, 0.0);
  return out;
}

/// Euclidean projection followed by lifting zeros to `floor`, giving an
/// interior point the Shahshahani operations accept.
inline RetractionResult project_to_interior(std::span<const double> y,
                                            double floor = kDefaultFloor) {
  std::vector<double> p = euclidean_simplex_projection(y);
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& c : p) c /= sum;
  const bool clamped = detail::clamp_to_floor(p, floor);
  return {SimplexPoint(std::move(p)), clamped};
}

}  // namespace simplex_langevin
