#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simplex_langevin/errors.hpp"
#include "simplex_langevin/geometry.hpp"
#include "simplex_langevin/objectives.hpp"
#include "simplex_langevin/rng.hpp"
#include "simplex_langevin/simplex.hpp"

namespace simplex_langevin {

enum class Method { LMWU, LinearMWU, ExpMWU, ProjLangevin };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::LMWU: return "lmwu";
    case Method::LinearMWU: return "linear-mwu";
    case Method::ExpMWU: return "exp-mwu";
    case Method::ProjLangevin: return "proj-langevin";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::LMWU, Method::LinearMWU, Method::ExpMWU, Method::ProjLangevin}) {
    if (s == method_name(m)) return m;
  }
  if (s == "mwu") return Method::LinearMWU;
  throw InvalidArgument("unknown method '" + std::string(s) +
                        "' (expected lmwu, linear-mwu, exp-mwu or proj-langevin)");
}

/// Step size, inverse temperature and run budget shared by all optimizers.
struct LmwuConfig {
  double eps = 1e-4;
  double beta = 100.0;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 0;
  double floor = kDefaultFloor;
  std::size_t resample_limit = 16;

  /// `max_block_dim` is the largest simplex block the config will be used on.
  void validate(std::size_t max_block_dim) const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("eps must be finite and > 0");
    if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
    if (!(floor > 0.0) || !(floor * static_cast<double>(max_block_dim) < 1.0)) {
      throw InvalidArgument("floor must lie in (0, 1/dim)");
    }
    if (resample_limit == 0) throw InvalidArgument("resample_limit must be positive");
  }
};

struct StepResult {
  SimplexPoint point;
  bool clamped = false;
  bool resampled = false;
};

/// Linear MWU: x_i <- x_i (1 - eps g_i) / (1 - eps sum_s x_s g_s).
inline StepResult mwu_linear_step(const SimplexPoint& x, std::span<const double> grad, double eps,
                                  double floor = kDefaultFloor) {
  detail::require_same_dim(x.dim(), grad.size(), "mwu_linear_step");
  double xg = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) xg += x[i] * grad[i];
  const double den = 1.0 - eps * xg;
  if (!(den > 0.0)) throw StepSizeTooLarge("mwu_linear_step: nonpositive denominator");
  // Dividing by the numerator sum equals dividing by `den` on the simplex and
  // keeps rounding in the coordinate sum from compounding across steps.
  std::vector<double> p(x.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double num = 1.0 - eps * grad[i];
    if (!(num > 0.0)) throw StepSizeTooLarge("mwu_linear_step: nonpositive numerator");
    p[i] = x[i] * num;
    sum += p[i];
  }
  for (double& c : p) c /= sum;
  const bool clamped = detail::clamp_to_floor(p, floor);
  return {SimplexPoint(std::move(p)), clamped, false};
}

/// Exponential MWU: x_i <- x_i e^{-eps g_i} / sum_s x_s e^{-eps g_s}, i.e.
/// exp_map(x, -eps * grad).
inline StepResult mwu_exponential_step(const SimplexPoint& x, std::span<const double> grad,
                                       double eps, double floor = kDefaultFloor) {
  detail::require_same_dim(x.dim(), grad.size(), "mwu_exponential_step");
  std::vector<double> v(grad.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -eps * grad[i];
  auto r = detail::exp_map_impl(x, v, floor);
  return {std::move(r.point), r.clamped, false};
}

/// Langevin MWU step:
///   V_i = (eps/2beta)(n + 1 - (1 + x_i) S_x) + sqrt(2 eps x_i / beta) z_i
///   x_i <- (x_i - eps x_i g_i + V_i) / (1 - eps sum_j x_j g_j + sum_j V_j)
/// A draw that makes the denominator <= floor or any numerator <= 0 is
/// redrawn, up to cfg.resample_limit times; after that the last draw is
/// clamped and renormalized, or the step fails if the denominator is still
/// not above the floor.
template <GaussianSource G>
StepResult lmwu_step(const SimplexPoint& x, std::span<const double> grad, const LmwuConfig& cfg,
                     G& gauss) {
  detail::require_same_dim(x.dim(), grad.size(), "lmwu_step");
  const std::size_t n = x.dim();
  double xg = 0.0;
  for (std::size_t i = 0; i < n; ++i) xg += x[i] * grad[i];

  std::vector<double> num(n);
  double den = 0.0;
  for (std::size_t attempt = 0;; ++attempt) {
    const NoiseDraw noise = sample_noise(x, cfg.eps, cfg.beta, gauss, cfg.floor);
    bool numerators_ok = true;
    double noise_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num[i] = x[i] - cfg.eps * x[i] * grad[i] + noise.values[i];
      noise_sum += noise.values[i];
      if (!(num[i] > 0.0) || !std::isfinite(num[i])) numerators_ok = false;
    }
    den = 1.0 - cfg.eps * xg + noise_sum;
    const bool den_ok = den > cfg.floor && std::isfinite(den);
    if (den_ok && numerators_ok) {
      // Same normalization as linear MWU: the numerator sum equals `den` on
      // the simplex.
      const double sum = std::accumulate(num.begin(), num.end(), 0.0);
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = num[i] / sum;
      const bool clamped = detail::clamp_to_floor(p, cfg.floor);
      return {SimplexPoint(std::move(p)), clamped, attempt > 0};
    }
    if (attempt == cfg.resample_limit) {
      if (!den_ok) {
        throw StepFailure("lmwu_step: denominator not above floor after " +
                              std::to_string(cfg.resample_limit) + " resamples",
                          std::nullopt, std::nullopt);
      }
      auto r = normalize_retraction(num, cfg.floor);
      return {std::move(r.point), true, attempt > 0};
    }
  }
}

/// Projected Langevin baseline: y = x - eps g + sqrt(2 eps / beta) z, then
/// Euclidean projection onto the simplex (zeros lifted to the floor).
template <GaussianSource G>
StepResult projected_langevin_step(const SimplexPoint& x, std::span<const double> grad,
                                   double eps, double beta, G& gauss,
                                   double floor = kDefaultFloor) {
  detail::require_same_dim(x.dim(), grad.size(), "projected_langevin_step");
  const double sigma = std::sqrt(2.0 * eps / beta);
  std::vector<double> y(x.dim());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = x[i] - eps * grad[i] + sigma * gauss.normal();
  }
  auto r = project_to_interior(y, floor);
  return {std::move(r.point), r.clamped, false};
}

// ---------------------------------------------------------------------------
// Products of simplices

/// A point of Delta_1 x ... x Delta_N stored block by block.
struct ProductPoint {
  std::vector<SimplexPoint> blocks;

  static ProductPoint from_flat(std::span<const double> flat,
                                std::span<const std::size_t> block_dims) {
    const std::size_t total = std::accumulate(block_dims.begin(), block_dims.end(), std::size_t{0});
    detail::require_same_dim(total, flat.size(), "ProductPoint::from_flat");
    ProductPoint p;
    std::size_t off = 0;
    for (std::size_t d : block_dims) {
      p.blocks.emplace_back(std::vector<double>(flat.begin() + off, flat.begin() + off + d));
      off += d;
    }
    return p;
  }

  static ProductPoint uniform(std::span<const std::size_t> block_dims) {
    ProductPoint p;
    for (std::size_t d : block_dims) p.blocks.push_back(SimplexPoint::barycenter(d));
    return p;
  }

  std::vector<double> flat() const {
    std::vector<double> out;
    for (const auto& b : blocks) out.insert(out.end(), b.vec().begin(), b.vec().end());
    return out;
  }

  std::vector<std::size_t> block_dims() const {
    std::vector<std::size_t> d;
    for (const auto& b : blocks) d.push_back(b.dim());
    return d;
  }
};

struct ProductStepResult {
  ProductPoint point;
  bool clamped = false;
  bool resampled = false;
};

/// Multi-agent Langevin MWU: the single-block update applied independently
/// to each block with block-local S_x, noise and normalization. Block b draws
/// its Gaussians from `sources[b]` only.
template <GaussianSource G>
ProductStepResult lmwu_multi_step(const ProductPoint& x, std::span<const double> grad,
                                  const LmwuConfig& cfg, std::span<G> sources) {
  const auto dims = x.block_dims();
  detail::require_same_dim(std::accumulate(dims.begin(), dims.end(), std::size_t{0}), grad.size(),
                           "lmwu_multi_step");
  if (sources.size() != x.blocks.size()) {
    throw InvalidArgument("lmwu_multi_step: need one noise source per block");
  }
  ProductStepResult out;
  std::size_t off = 0;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) {
    const auto& blk = x.blocks[b];
    try {
      auto r = lmwu_step(blk, grad.subspan(off, blk.dim()), cfg, sources[b]);
      out.clamped |= r.clamped;
      out.resampled |= r.resampled;
      out.point.blocks.push_back(std::move(r.point));
    } catch (const StepFailure& e) {
      throw StepFailure(std::string(e.what()) + " (block " + std::to_string(b) + ")",
                        e.iteration(), b);
    }
    off += blk.dim();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run orchestration

struct TrajectoryRecord {
  std::size_t iter = 0;
  std::vector<double> point;
  double f_value = 0.0;
  bool clamped = false;
  bool resampled = false;
};

using Trajectory = std::vector<TrajectoryRecord>;

namespace detail {

template <GaussianSource G>
ProductStepResult product_step(Method method, const ProductPoint& x, std::span<const double> grad,
                               const LmwuConfig& cfg, std::span<G> sources) {
  if (method == Method::LMWU) return lmwu_multi_step(x, grad, cfg, sources);
  ProductStepResult out;
  std::size_t off = 0;
  for (std::size_t b = 0; b < x.blocks.size(); ++b) {
    const auto& blk = x.blocks[b];
    const auto g = grad.subspan(off, blk.dim());
    StepResult r = [&] {
      switch (method) {
        case Method::LinearMWU: return mwu_linear_step(blk, g, cfg.eps, cfg.floor);
        case Method::ExpMWU: return mwu_exponential_step(blk, g, cfg.eps, cfg.floor);
        default: return projected_langevin_step(blk, g, cfg.eps, cfg.beta, sources[b], cfg.floor);
      }
    }();
    out.clamped |= r.clamped;
    out.resampled |= r.resampled;
    out.point.blocks.push_back(std::move(r.point));
    off += blk.dim();
  }
  return out;
}

inline void check_layout(const Objective& objective, const ProductPoint& init,
                         const LmwuConfig& cfg) {
  if (init.block_dims() != objective.block_dims()) {
    throw InvalidArgument("initial point does not match the objective's block layout");
  }
  cfg.validate(*std::max_element(objective.block_dims().begin(), objective.block_dims().end()));
}

}  // namespace detail

/// Runs `cfg.max_iters` steps from `init`, calling `on_record` with the
/// initial record and then once per step. Block b of stochastic methods draws
/// from `sources[b]`. Step errors are rethrown as StepFailure tagged with the
/// 1-based iteration that failed.
template <GaussianSource G, class OnRecord>
ProductPoint drive_optimizer(Method method, const Objective& objective, const ProductPoint& init,
                             const LmwuConfig& cfg, std::span<G> sources, OnRecord&& on_record) {
  detail::check_layout(objective, init, cfg);
  if (sources.size() != init.blocks.size()) {
    throw InvalidArgument("drive_optimizer: need one noise source per block");
  }
  ProductPoint x = init;
  std::vector<double> flat = x.flat();
  on_record(TrajectoryRecord{0, flat, objective.value(flat), false, false});
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    const std::vector<double> grad = objective.gradient(flat);
    ProductStepResult r = [&] {
      try {
        return detail::product_step(method, x, grad, cfg, sources);
      } catch (const StepFailure& e) {
        throw StepFailure("iteration " + std::to_string(k) + ": " + e.what(), k, e.block());
      } catch (const std::runtime_error& e) {
        throw StepFailure("iteration " + std::to_string(k) + ": " + e.what(), k, std::nullopt);
      }
    }();
    x = std::move(r.point);
    flat = x.flat();
    on_record(TrajectoryRecord{k, flat, objective.value(flat), r.clamped, r.resampled});
  }
  return x;
}

/// Full trajectory (max_iters + 1 records, the initial point included) with
/// explicit per-block noise sources.
template <GaussianSource G>
Trajectory run_optimizer_with(Method method, const Objective& objective, const ProductPoint& init,
                              const LmwuConfig& cfg, std::span<G> sources) {
  Trajectory traj;
  traj.reserve(cfg.max_iters + 1);
  drive_optimizer(method, objective, init, cfg, sources,
                  [&](TrajectoryRecord rec) { traj.push_back(std::move(rec)); });
  return traj;
}

/// Per-block generators for a run: block b uses stream b of cfg.seed.
inline std::vector<Rng> block_generators(const LmwuConfig& cfg, std::size_t blocks) {
  std::vector<Rng> g;
  g.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) g.emplace_back(cfg.seed, b);
  return g;
}

inline Trajectory run_optimizer(Method method, const Objective& objective,
                                const ProductPoint& init, const LmwuConfig& cfg) {
  auto sources = block_generators(cfg, init.blocks.size());
  return run_optimizer_with(method, objective, init, cfg, std::span<Rng>(sources));
}

/// Summary of a run that only needs its endpoint.
struct RunSummary {
  ProductPoint final_point;
  double final_f = 0.0;
  double best_f = std::numeric_limits<double>::infinity();
  std::size_t clamped_steps = 0;
  std::size_t resampled_steps = 0;
};

inline RunSummary run_to_end(Method method, const Objective& objective, const ProductPoint& init,
                             const LmwuConfig& cfg) {
  auto sources = block_generators(cfg, init.blocks.size());
  RunSummary s{init};
  s.final_point = drive_optimizer(method, objective, init, cfg, std::span<Rng>(sources),
                                  [&](const TrajectoryRecord& rec) {
                                    s.final_f = rec.f_value;
                                    s.best_f = std::min(s.best_f, rec.f_value);
                                    s.clamped_steps += rec.clamped;
                                    s.resampled_steps += rec.resampled;
                                  });
  return s;
}

// ---------------------------------------------------------------------------
// Theoretical step size and iteration budget (planning aids only)

/// Constants of the convergence guarantee. m, b, A and K are carried for
/// documentation; only M, B, sigma, alpha, C and delta enter the formulas.
struct TheoryBudget {
  double M = 1.0;      // smoothness
  double B = 0.0;      // gradient bound at the barycenter
  double sigma = 0.0;  // second-moment bound
  double alpha = 1.0;  // log-Sobolev constant
  double C = 1.0;
  double delta = 1.0;  // target accuracy
  double m = 1.0;
  double b = 0.0;
  double A = 0.0;
  double K = 0.0;

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(M) || M < 0.0) throw InvalidArgument("TheoryBudget: M must be finite and >= 0");
    if (!finite(B) || B < 0.0) throw InvalidArgument("TheoryBudget: B must be >= 0");
    if (!finite(sigma) || sigma < 0.0) throw InvalidArgument("TheoryBudget: sigma must be >= 0");
    if (!finite(alpha) || !(alpha > 0.0)) throw InvalidArgument("TheoryBudget: alpha must be > 0");
    if (!finite(C) || !(C > 0.0)) throw InvalidArgument("TheoryBudget: C must be > 0");
    if (!finite(delta) || !(delta > 0.0)) throw InvalidArgument("TheoryBudget: delta must be > 0");
    if (!finite(m) || !(m > 0.0)) throw InvalidArgument("TheoryBudget: m must be > 0");
    if (!finite(b) || b < 0.0 || !finite(A) || A < 0.0 || !finite(K) || K < 0.0) {
      throw InvalidArgument("TheoryBudget: b, A and K must be >= 0");
    }
    if (!(M * sigma / 2.0 + B > 0.0)) {
      throw InvalidArgument("TheoryBudget: M*sigma/2 + B must be > 0");
    }
  }

  double gradient_scale() const { return M / 2.0 * sigma + B; }
};

/// eps < delta^2 alpha / (8 C (M sigma / 2 + B)), the bound used to pick the
/// step size in the single-agent algorithm header.
inline double theoretical_step_bound(const TheoryBudget& tb) {
  tb.validate();
  return tb.delta * tb.delta * tb.alpha / (8.0 * tb.C * tb.gradient_scale());
}

/// Same bound with (M sigma / 2 + B) squared, as it appears in the
/// convergence corollary.
inline double theoretical_step_bound_squared(const TheoryBudget& tb) {
  tb.validate();
  const double s = tb.gradient_scale();
  return tb.delta * tb.delta * tb.alpha / (8.0 * tb.C * s * s);
}

/// ceil( 16/(3 eps) * ln( 16 (M sigma/2 + B)^2 / (delta^2 alpha) ) ), at least 1.
inline std::uint64_t theoretical_iteration_budget(const TheoryBudget& tb, double eps) {
  tb.validate();
  if (!(eps > 0.0)) throw InvalidArgument("theoretical_iteration_budget: eps must be > 0");
  const double s = tb.gradient_scale();
  const double arg = 16.0 * s * s / (tb.delta * tb.delta * tb.alpha);
  const double k = 16.0 / (3.0 * eps) * std::log(arg);
  if (!(k > 1.0)) return 1;
  return static_cast<std::uint64_t>(std::ceil(k));
}

}  // namespace simplex_langevin
