#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simplex_langevin/errors.hpp"

namespace simplex_langevin {

inline constexpr double kDefaultFloor = 1e-12;
inline constexpr double kSimplexSumTolerance = 1e-9;
inline constexpr double kTangentSumTolerance = 1e-9;

/// Strictly positive probability vector (a point of the open simplex).
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) {
      throw InvalidArgument("SimplexPoint: dimension must be at least 2");
    }
    double sum = 0.0;
    for (double c : coords_) {
      if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidArgument("SimplexPoint: coordinates must be finite and > 0");
      }
      sum += c;
    }
    if (std::abs(sum - 1.0) > kSimplexSumTolerance) {
      throw InvalidArgument("SimplexPoint: coordinates sum to " + std::to_string(sum));
    }
  }

  static SimplexPoint barycenter(std::size_t n) {
    return SimplexPoint(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }
  double min_coord() const { return *std::min_element(coords_.begin(), coords_.end()); }

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Zero-sum vector attached to a base point.
class TangentVector {
 public:
  TangentVector(SimplexPoint base, std::vector<double> components)
      : base_(std::move(base)), components_(std::move(components)) {
    if (components_.size() != base_.dim()) {
      throw InvalidArgument("TangentVector: dimension mismatch with base point");
    }
    const double sum = std::accumulate(components_.begin(), components_.end(), 0.0);
    if (std::abs(sum) > kTangentSumTolerance) {
      throw InvalidArgument("TangentVector: components must sum to 0");
    }
  }

  const SimplexPoint& base() const { return base_; }
  std::span<const double> components() const { return components_; }
  const std::vector<double>& vec() const { return components_; }

 private:
  SimplexPoint base_;
  std::vector<double> components_;
};

/// One draw of the Riemannian noise term: values = drift_part + gauss_part.
struct NoiseDraw {
  std::vector<double> values;
  std::vector<double> drift_part;
  std::vector<double> gauss_part;
};

/// A retraction's output together with whether the positivity floor had to
/// be enforced.
struct RetractionResult {
  SimplexPoint point;
  bool clamped = false;
};

namespace detail {

inline void require_same_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InvalidArgument(std::string(what) + ": expected dimension " +
                          std::to_string(expected) + ", got " + std::to_string(got));
  }
}

/// Raises every coordinate below `floor` to exactly `floor` and rescales the
/// rest so the vector keeps unit mass. `p` must already sum to ~1 and
/// floor * p.size() < 1. Returns whether anything was clamped.
inline bool clamp_to_floor(std::vector<double>& p, double floor) {
  std::vector<char> fixed(p.size(), 0);
  bool clamped = false;
  for (;;) {
    bool changed = false;
    std::size_t n_fixed = 0;
    double free_sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!fixed[i] && !(p[i] >= floor)) {
        fixed[i] = 1;
        p[i] = floor;
        changed = true;
      }
      if (fixed[i]) {
        ++n_fixed;
      } else {
        free_sum += p[i];
      }
    }
    if (!changed) return clamped;
    clamped = true;
    if (n_fixed == p.size() || !(free_sum > 0.0)) {
      // Everything is at the floor: fall back to uniform.
      std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
      return true;
    }
    const double scale = (1.0 - floor * static_cast<double>(n_fixed)) / free_sum;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!fixed[i]) p[i] *= scale;
    }
  }
}

}  // namespace detail

}  // namespace simplex_langevin
