#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simplex_langevin/errors.hpp"
#include "simplex_langevin/simplex.hpp"

namespace simplex_langevin {

struct KnownOptimum {
  std::vector<double> point;
  double value = 0.0;
};

/// A differentiable function over a product of simplices. Coordinates are
/// passed flat; `block_dims` describes how they split into simplex blocks.
class Objective {
 public:
  using EvalFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<std::vector<double>(std::span<const double>)>;

  Objective(std::string name, std::vector<std::size_t> block_dims, EvalFn eval, GradFn grad,
            std::optional<KnownOptimum> known_optimum = std::nullopt)
      : name_(std::move(name)),
        block_dims_(std::move(block_dims)),
        eval_(std::move(eval)),
        grad_(std::move(grad)),
        known_optimum_(std::move(known_optimum)) {
    if (block_dims_.empty()) throw InvalidArgument("Objective: no simplex blocks");
    for (std::size_t d : block_dims_) {
      if (d < 2) throw InvalidArgument("Objective: every block needs dimension >= 2");
    }
    dim_ = std::accumulate(block_dims_.begin(), block_dims_.end(), std::size_t{0});
    if (!eval_ || !grad_) throw InvalidArgument("Objective: eval and grad are required");
  }

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const std::vector<std::size_t>& block_dims() const { return block_dims_; }
  const std::optional<KnownOptimum>& known_optimum() const { return known_optimum_; }

  double value(std::span<const double> x) const {
    detail::require_same_dim(dim_, x.size(), "Objective::value");
    return eval_(x);
  }

  std::vector<double> gradient(std::span<const double> x) const {
    detail::require_same_dim(dim_, x.size(), "Objective::gradient");
    std::vector<double> g = grad_(x);
    detail::require_same_dim(dim_, g.size(), "Objective::gradient (output)");
    return g;
  }

 private:
  std::string name_;
  std::vector<std::size_t> block_dims_;
  std::size_t dim_ = 0;
  EvalFn eval_;
  GradFn grad_;
  std::optional<KnownOptimum> known_optimum_;
};

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
inline std::vector<double> finite_difference_gradient(const Objective& f,
                                                      std::span<const double> x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_difference_gradient: h must be > 0");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f.value(probe);
    probe[i] = x[i] - h;
    const double down = f.value(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Benchmark test functions f1..f6 (three-, five- and six-variate nonconvex
// functions with several local minima on the simplex).

namespace detail {

inline double sq(double a) { return a * a; }
inline double cube(double a) { return a * a * a; }

// d/dt (t-a)^2 (t-b)^2
inline double dquartic(double t, double a, double b) {
  return 2.0 * (t - a) * (t - b) * (2.0 * t - a - b);
}

struct TwoWell {
  double value;
  std::array<double, 3> grad;
};

// -ln(e^{qa} + e^{qb}) for quadratic exponents qa, qb, via log-sum-exp.
inline TwoWell neg_log_two_wells(std::span<const double> p, const std::array<double, 3>& ca,
                                 const std::array<double, 3>& ka,
                                 const std::array<double, 3>& cb,
                                 const std::array<double, 3>& kb) {
  double qa = 0.0;
  double qb = 0.0;
  for (int i = 0; i < 3; ++i) {
    qa -= ka[i] * sq(p[i] - ca[i]);
    qb -= kb[i] * sq(p[i] - cb[i]);
  }
  const double m = std::max(qa, qb);
  const double ea = std::exp(qa - m);
  const double eb = std::exp(qb - m);
  const double s = ea + eb;
  TwoWell out;
  out.value = -(m + std::log(s));
  const double wa = ea / s;
  const double wb = eb / s;
  for (int i = 0; i < 3; ++i) {
    const double dqa = -2.0 * ka[i] * (p[i] - ca[i]);
    const double dqb = -2.0 * kb[i] * (p[i] - cb[i]);
    out.grad[i] = -(wa * dqa + wb * dqb);
  }
  return out;
}

inline std::size_t test_function_arity(int id) {
  switch (id) {
    case 1: case 2: case 3: case 4: return 3;
    case 5: return 5;
    case 6: return 6;
    default:
      throw InvalidArgument("unknown test function id " + std::to_string(id) + " (expected 1..6)");
  }
}

}  // namespace detail

inline std::size_t test_function_arity(int id) { return detail::test_function_arity(id); }

inline double eval_test_function(int id, std::span<const double> p) {
  using detail::cube;
  using detail::sq;
  detail::require_same_dim(detail::test_function_arity(id), p.size(), "eval_test_function");
  switch (id) {
    case 1:
      return detail::neg_log_two_wells(p, {0.3, 0.5, 0.2}, {10, 20, 30}, {0.4, 0.2, 0.4},
                                       {30, 20, 36}).value +
             p[1] + 10.0;
    case 2:
      return detail::neg_log_two_wells(p, {0.4, 0.4, 0.2}, {15, 60, 10}, {0.4, 0.2, 0.4},
                                       {3, 2, 6}).value +
             p[1];
    case 3: {
      const double x = p[0], y = p[1], z = p[2];
      return sq(x - 0.3) * sq(x - 0.9) + sq(y - 0.2) * sq(y - 0.7) +
             sq(z - 0.6) * sq(z - 0.1) + (x - 0.3) * (y - 0.5);
    }
    case 4: {
      const double x = p[0], y = p[1], z = p[2];
      return -sq(x - 0.6) * sq(x - 0.2) + (y - 0.3) * cube(y - 0.4) +
             cube(z - 0.2) * (z - 0.8) - x * y - 0.4 * z;
    }
    case 5: {
      const double x = p[0], y = p[1], z = p[2], w = p[3], v = p[4];
      return sq(x - 0.6) * sq(x - 0.2) - x * y + sq(y - 0.3) * sq(y - 0.4) +
             sq(sq(z - 0.2)) - 0.5 * z * w + sq(sq(w - 0.5)) + sq(sq(v - 0.3));
    }
    default: {
      const double x = p[0], y = p[1], z = p[2], w = p[3], v = p[4], h = p[5];
      return sq(x - 0.6) * (x - 0.8) + (y - 0.9) * sq(y - 0.4) + sq(z - 0.2) +
             sq(v - 0.6) + sq(w - 0.5) - 0.5 * v * w + sq(h - 0.5);
    }
  }
}

/// Analytic Euclidean partial derivatives of f_id.
inline std::vector<double> grad_test_function(int id, std::span<const double> p) {
  using detail::cube;
  using detail::dquartic;
  using detail::sq;
  detail::require_same_dim(detail::test_function_arity(id), p.size(), "grad_test_function");
  switch (id) {
    case 1: {
      auto w = detail::neg_log_two_wells(p, {0.3, 0.5, 0.2}, {10, 20, 30}, {0.4, 0.2, 0.4},
                                         {30, 20, 36});
      return {w.grad[0], w.grad[1] + 1.0, w.grad[2]};
    }
    case 2: {
      auto w = detail::neg_log_two_wells(p, {0.4, 0.4, 0.2}, {15, 60, 10}, {0.4, 0.2, 0.4},
                                         {3, 2, 6});
      return {w.grad[0], w.grad[1] + 1.0, w.grad[2]};
    }
    case 3: {
      const double x = p[0], y = p[1], z = p[2];
      return {dquartic(x, 0.3, 0.9) + (y - 0.5), dquartic(y, 0.2, 0.7) + (x - 0.3),
              dquartic(z, 0.6, 0.1)};
    }
    case 4: {
      const double x = p[0], y = p[1], z = p[2];
      return {-dquartic(x, 0.6, 0.2) - y,
              cube(y - 0.4) + 3.0 * (y - 0.3) * sq(y - 0.4) - x,
              3.0 * sq(z - 0.2) * (z - 0.8) + cube(z - 0.2) - 0.4};
    }
    case 5: {
      const double x = p[0], y = p[1], z = p[2], w = p[3], v = p[4];
      return {dquartic(x, 0.6, 0.2) - y, dquartic(y, 0.3, 0.4) - x,
              4.0 * cube(z - 0.2) - 0.5 * w, 4.0 * cube(w - 0.5) - 0.5 * z,
              4.0 * cube(v - 0.3)};
    }
    default: {
      const double x = p[0], y = p[1], z = p[2], w = p[3], v = p[4], h = p[5];
      return {2.0 * (x - 0.6) * (x - 0.8) + sq(x - 0.6),
              sq(y - 0.4) + 2.0 * (y - 0.9) * (y - 0.4),
              2.0 * (z - 0.2),
              2.0 * (w - 0.5) - 0.5 * v,
              2.0 * (v - 0.6) - 0.5 * w,
              2.0 * (h - 0.5)};
    }
  }
}

/// Published global minimizers of f1..f6 (rounded to four decimals; points
/// are used verbatim, so their coordinates may sum to 1 +- 1e-4).
inline std::vector<double> listed_optimum(int id) {
  switch (id) {
    case 1: return {0.4049, 0.1969, 0.3981};
    case 2: return {0.3804, 0.3736, 0.2461};
    case 3: return {1.0, 0.0, 0.0};
    case 4: return {0.0008, 0.1464, 0.8527};
    case 5: return {0.5111, 0.4889, 0.0, 0.0, 0.0};
    case 6: return {0.0, 0.0, 0.0182, 0.5309, 0.4509, 0.0};
    default:
      throw InvalidArgument("unknown test function id " + std::to_string(id) + " (expected 1..6)");
  }
}

/// Experiment configuration used for each benchmark's convergence figure.
struct BenchmarkSetting {
  std::vector<double> init;
  double mwu_eps;
  double lmwu_eps;
  std::array<double, 3> betas;
};

inline BenchmarkSetting benchmark_setting(int id) {
  switch (id) {
    case 1: return {{0.3, 0.6, 0.1}, 1e-3, 1e-4, {10, 50, 100}};
    case 2: return {{0.4, 0.1, 0.5}, 1e-3, 5e-5, {10, 50, 100}};
    case 3: return {{0.2, 0.75, 0.05}, 1e-2, 1e-3, {10, 2000, 5000}};
    case 4: return {{0.5, 0.4, 0.1}, 1e-2, 2e-4, {1000, 2000, 8000}};
    case 5: return {{0.1, 0.05, 0.4, 0.4, 0.05}, 5e-2, 5e-3, {800, 2000, 3000}};
    case 6: return {{0.4, 0.1, 0.1, 0.2, 0.1, 0.1}, 1e-4, 1e-4, {300, 3000, 8000}};
    default:
      throw InvalidArgument("unknown test function id " + std::to_string(id) + " (expected 1..6)");
  }
}

inline Objective test_function(int id) {
  const std::size_t n = detail::test_function_arity(id);
  const auto opt = listed_optimum(id);
  return Objective(
      "f" + std::to_string(id), {n},
      [id](std::span<const double> x) { return eval_test_function(id, x); },
      [id](std::span<const double> x) { return grad_test_function(id, x); },
      KnownOptimum{opt, eval_test_function(id, opt)});
}

// ---------------------------------------------------------------------------
// Polynomial portfolio loss
//
//   f(w) = -l1 m1 + l2 m2 - l3 m3 + ... = sum_k (-1)^k l_k m_k
//
// with p_t = r_t . w, m1 = mean_t p_t and m_k (k >= 2) the biased
// (divide-by-T) k-th sample central moment of p.

class PortfolioLoss {
 public:
  PortfolioLoss(std::vector<std::vector<double>> returns, std::vector<double> lambdas)
      : lambdas_(std::move(lambdas)) {
    rows_ = returns.size();
    if (rows_ < 2) throw InvalidArgument("PortfolioLoss: need at least two return rows");
    cols_ = returns.front().size();
    if (cols_ == 0) throw InvalidArgument("PortfolioLoss: need at least one asset");
    data_.reserve(rows_ * cols_);
    for (const auto& row : returns) {
      if (row.size() != cols_) throw InvalidArgument("PortfolioLoss: ragged return matrix");
      data_.insert(data_.end(), row.begin(), row.end());
    }
    if (lambdas_.empty()) throw InvalidArgument("PortfolioLoss: empty risk-preference vector");
    double sum = 0.0;
    for (double l : lambdas_) {
      if (!(l >= 0.0)) throw InvalidArgument("PortfolioLoss: lambdas must be nonnegative");
      sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("PortfolioLoss: lambdas must sum to 1");
  }

  std::size_t periods() const { return rows_; }
  std::size_t assets() const { return cols_; }
  std::size_t order() const { return lambdas_.size(); }
  const std::vector<double>& lambdas() const { return lambdas_; }
  std::span<const double> row(std::size_t t) const { return {data_.data() + t * cols_, cols_}; }

  /// Per-period portfolio returns p_t = r_t . w.
  std::vector<double> portfolio_returns(std::span<const double> w) const {
    detail::require_same_dim(cols_, w.size(), "PortfolioLoss");
    std::vector<double> p(rows_);
    for (std::size_t t = 0; t < rows_; ++t) {
      auto r = row(t);
      p[t] = std::inner_product(r.begin(), r.end(), w.begin(), 0.0);
    }
    return p;
  }

  /// m[0] = sample mean, m[k-1] = k-th central moment for k = 2..order.
  std::vector<double> moments(std::span<const double> w) const {
    const auto p = portfolio_returns(w);
    const double T = static_cast<double>(rows_);
    const double mu = std::accumulate(p.begin(), p.end(), 0.0) / T;
    std::vector<double> m(order(), 0.0);
    m[0] = mu;
    for (double pt : p) {
      const double d = pt - mu;
      double dk = d;
      for (std::size_t k = 2; k <= order(); ++k) {
        dk *= d;
        m[k - 1] += dk;
      }
    }
    for (std::size_t k = 1; k < order(); ++k) m[k] /= T;
    return m;
  }

  double value(std::span<const double> w) const { return combine(moments(w)); }

  /// Signed combination sum_k (-1)^k l_k m_k of a moment vector.
  double combine(std::span<const double> m) const {
    double f = 0.0;
    for (std::size_t k = 1; k <= order(); ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      f += sign * lambdas_[k - 1] * m[k - 1];
    }
    return f;
  }

  /// dm1/dw = rbar; dm_k/dw = (k/T) sum_t (p_t - mu)^{k-1} (r_t - rbar).
  std::vector<double> gradient(std::span<const double> w) const {
    const auto p = portfolio_returns(w);
    const double T = static_cast<double>(rows_);
    const double mu = std::accumulate(p.begin(), p.end(), 0.0) / T;
    std::vector<double> rbar(cols_, 0.0);
    for (std::size_t t = 0; t < rows_; ++t) {
      auto r = row(t);
      for (std::size_t j = 0; j < cols_; ++j) rbar[j] += r[j];
    }
    for (double& v : rbar) v /= T;

    // Per-period weight: sum_k (-1)^k l_k (k/T) (p_t - mu)^{k-1}, k >= 2.
    std::vector<double> g(cols_);
    for (std::size_t j = 0; j < cols_; ++j) g[j] = -lambdas_[0] * rbar[j];
    if (order() < 2) return g;
    for (std::size_t t = 0; t < rows_; ++t) {
      const double d = p[t] - mu;
      double dpow = 1.0;  // d^{k-1}
      double coef = 0.0;
      for (std::size_t k = 2; k <= order(); ++k) {
        dpow *= d;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        coef += sign * lambdas_[k - 1] * static_cast<double>(k) * dpow;
      }
      coef /= T;
      auto r = row(t);
      for (std::size_t j = 0; j < cols_; ++j) g[j] += coef * (r[j] - rbar[j]);
    }
    return g;
  }

 private:
  std::vector<double> data_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> lambdas_;
};

inline double portfolio_loss(const PortfolioLoss& loss, std::span<const double> w) {
  return loss.value(w);
}

inline std::vector<double> portfolio_loss_grad(const PortfolioLoss& loss,
                                               std::span<const double> w) {
  return loss.gradient(w);
}

/// Wraps a portfolio loss as a single-block objective over the asset simplex.
inline Objective portfolio_objective(PortfolioLoss loss, std::string name = "portfolio") {
  auto shared = std::make_shared<const PortfolioLoss>(std::move(loss));
  const std::size_t n = shared->assets();
  if (n < 2) throw InvalidArgument("portfolio_objective: need at least two assets");
  return Objective(
      std::move(name), {n}, [shared](std::span<const double> w) { return shared->value(w); },
      [shared](std::span<const double> w) { return shared->gradient(w); });
}

}  // namespace simplex_langevin
