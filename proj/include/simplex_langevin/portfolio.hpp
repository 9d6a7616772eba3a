#pragma once

// Return-panel ingestion and rolling-window out-of-sample evaluation of the
// polynomial portfolio loss under the six risk-preference presets.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <future>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "simplex_langevin/csv.hpp"
#include "simplex_langevin/errors.hpp"
#include "simplex_langevin/objectives.hpp"
#include "simplex_langevin/optimizers.hpp"

namespace simplex_langevin {

/// Dated matrix of simple per-period returns, one row per period.
struct ReturnPanel {
  std::vector<std::string> dates;
  std::vector<std::string> asset_names;
  std::vector<std::vector<double>> returns;

  std::size_t periods() const { return returns.size(); }
  std::size_t assets() const { return asset_names.size(); }
};

/// Parses `date,<asset1>,...,<assetn>` CSV. Numbers are read with
/// std::from_chars, so parsing ignores the global locale.
inline ReturnPanel load_returns(std::istream& in) {
  ReturnPanel panel;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::set<std::string, std::less<>> seen_dates;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = csv::trim(line);
    if (view.empty()) continue;
    auto cells = csv::split(view);
    if (!have_header) {
      if (csv::trim(cells.front()) != "date") {
        throw ParseError("header must start with 'date'", lineno);
      }
      if (cells.size() < 2) throw ParseError("header names no assets", lineno);
      for (std::size_t i = 1; i < cells.size(); ++i) {
        auto name = csv::trim(cells[i]);
        if (name.empty()) throw ParseError("empty asset name in header", lineno);
        panel.asset_names.emplace_back(name);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != panel.asset_names.size() + 1) {
      throw ParseError("expected " + std::to_string(panel.asset_names.size() + 1) +
                           " cells, got " + std::to_string(cells.size()),
                       lineno);
    }
    auto date = csv::trim(cells.front());
    if (date.empty()) throw ParseError("empty date", lineno);
    if (!seen_dates.emplace(date).second) {
      throw ParseError("duplicate date '" + std::string(date) + "'", lineno);
    }
    std::vector<double> row;
    row.reserve(panel.asset_names.size());
    for (std::size_t i = 1; i < cells.size(); ++i) {
      auto cell = csv::trim(cells[i]);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError("non-numeric cell '" + std::string(cell) + "' for asset " +
                             panel.asset_names[i - 1],
                         lineno);
      }
      if (!std::isfinite(v) || !(v > -1.0)) {
        throw ParseError("return for asset " + panel.asset_names[i - 1] +
                             " must be finite and > -1",
                         lineno);
      }
      row.push_back(v);
    }
    panel.dates.emplace_back(date);
    panel.returns.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("missing header", lineno == 0 ? 1 : lineno);
  if (panel.returns.empty()) throw ParseError("no data rows", lineno);
  return panel;
}

// ---------------------------------------------------------------------------
// Risk preferences

enum class PresetId { Increasing, Degenerate, MV, MVS, MVSK, Equal };

struct RiskPreset {
  std::string name;
  std::vector<double> lambdas;
};

inline RiskPreset risk_preset(PresetId id) {
  switch (id) {
    case PresetId::Increasing:
      return {"Increasing", {1.0 / 15, 2.0 / 15, 3.0 / 15, 4.0 / 15, 5.0 / 15}};
    case PresetId::Degenerate:
      return {"Degenerate", {5.0 / 15, 4.0 / 15, 3.0 / 15, 2.0 / 15, 1.0 / 15}};
    case PresetId::MV: return {"MV", {1.0 / 2, 1.0 / 2, 0, 0, 0}};
    case PresetId::MVS: return {"MVS", {1.0 / 3, 1.0 / 3, 1.0 / 3, 0, 0}};
    case PresetId::MVSK: return {"MVSK", {1.0 / 4, 1.0 / 4, 1.0 / 4, 1.0 / 4, 0}};
    case PresetId::Equal: return {"Equal", {1.0 / 5, 1.0 / 5, 1.0 / 5, 1.0 / 5, 1.0 / 5}};
  }
  throw InvalidArgument("unknown preset");
}

/// The six presets in table order.
inline std::vector<RiskPreset> all_presets() {
  std::vector<RiskPreset> out;
  for (PresetId id : {PresetId::Increasing, PresetId::Degenerate, PresetId::MV, PresetId::MVS,
                      PresetId::MVSK, PresetId::Equal}) {
    out.push_back(risk_preset(id));
  }
  return out;
}

/// Case-insensitive preset lookup by name.
inline RiskPreset parse_preset(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string key = lower(name);
  for (auto& p : all_presets()) {
    if (lower(p.name) == key) return p;
  }
  throw InvalidArgument("unknown risk preset '" + std::string(name) +
                        "' (expected increasing, degenerate, mv, mvs, mvsk or equal)");
}

// ---------------------------------------------------------------------------
// Rolling-window evaluation

/// How the single next-period loss is scored.
///  - Literal: the loss applied to one observation; its central moments
///    vanish, leaving -l1 * w.r_t.
///  - WindowMoments: -l1 * w.r_t plus the moment terms of the fitted weights
///    computed on the training window.
enum class LossVariant { Literal, WindowMoments };

inline std::string_view variant_name(LossVariant v) {
  return v == LossVariant::Literal ? "literal" : "window-moments";
}

inline LossVariant parse_variant(std::string_view s) {
  if (s == "literal") return LossVariant::Literal;
  if (s == "window-moments") return LossVariant::WindowMoments;
  throw InvalidArgument("unknown loss variant '" + std::string(s) +
                        "' (expected literal or window-moments)");
}

struct EvaluationOptions {
  LossVariant variant = LossVariant::Literal;
  bool warm_start = true;
};

inline constexpr std::size_t kDefaultWindow = 1000;

struct EvaluationReport {
  std::string method;
  std::string preset;
  std::string variant;
  std::size_t window = 0;
  std::vector<std::size_t> periods;  // 1-based panel row of each scored period
  std::vector<std::string> dates;
  std::vector<double> per_period_losses;
  std::vector<std::vector<double>> fitted_weights;
  double score = 0.0;
  double runtime_seconds = 0.0;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// For each period t = L+1..T, fits weights on rows t-L..t-1 and scores them
/// on row t; Score is the mean of those T-L losses. Window j's optimizer run
/// uses a seed derived from (cfg.seed, j).
inline EvaluationReport rolling_window_evaluate(const ReturnPanel& panel, const RiskPreset& preset,
                                                Method method, const LmwuConfig& cfg,
                                                std::size_t window,
                                                const EvaluationOptions& opts = {}) {
  const std::size_t T = panel.periods();
  const std::size_t n = panel.assets();
  if (window < 2) throw InvalidArgument("rolling_window_evaluate: window must be >= 2");
  if (window >= T) {
    throw InvalidArgument("rolling_window_evaluate: window " + std::to_string(window) +
                          " must be smaller than the number of periods " + std::to_string(T));
  }
  if (n < 2) throw InvalidArgument("rolling_window_evaluate: need at least two assets");
  cfg.validate(n);

  const auto start = std::chrono::steady_clock::now();
  EvaluationReport rep;
  rep.method = std::string(method_name(method));
  rep.preset = preset.name;
  rep.variant = std::string(variant_name(opts.variant));
  rep.window = window;

  const std::vector<std::size_t> dims{n};
  ProductPoint w = ProductPoint::uniform(dims);
  for (std::size_t j = 0; j + window < T; ++j) {
    std::vector<std::vector<double>> rows(panel.returns.begin() + j,
                                          panel.returns.begin() + j + window);
    PortfolioLoss loss(std::move(rows), preset.lambdas);
    const Objective obj = portfolio_objective(loss);

    LmwuConfig wcfg = cfg;
    wcfg.seed = mix64(cfg.seed ^ mix64(j + 1));
    const ProductPoint init = opts.warm_start ? w : ProductPoint::uniform(dims);
    try {
      w = run_to_end(method, obj, init, wcfg).final_point;
    } catch (const StepFailure& e) {
      throw StepFailure("period " + std::to_string(window + j + 1) + ": " + e.what(),
                        e.iteration(), e.block());
    }

    const std::vector<double> wh = w.flat();
    const auto& next = panel.returns[window + j];
    double loss_t = -preset.lambdas[0] * std::inner_product(wh.begin(), wh.end(), next.begin(), 0.0);
    if (opts.variant == LossVariant::WindowMoments) {
      std::vector<double> m = loss.moments(wh);
      m[0] = 0.0;  // mean term already scored on the next-period return
      loss_t += loss.combine(m);
    }
    rep.periods.push_back(window + j + 1);
    rep.dates.push_back(panel.dates[window + j]);
    rep.per_period_losses.push_back(loss_t);
    rep.fitted_weights.push_back(wh);
  }
  rep.score = mean_of(rep.per_period_losses);
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// One (method, preset) cell of a comparison table.
struct ScoreCell {
  std::optional<EvaluationReport> report;
  std::string error;  // set when the cell failed
};

struct ScoreTable {
  std::vector<Method> methods;
  std::vector<RiskPreset> presets;
  std::vector<std::vector<ScoreCell>> cells;  // [method][preset]
};

/// Evaluates every (method, preset) pair; cells run concurrently and a failing
/// cell is recorded rather than aborting the table. All cells use cfg.seed.
inline ScoreTable compare_methods(const ReturnPanel& panel, const std::vector<RiskPreset>& presets,
                                  const std::vector<Method>& methods, const LmwuConfig& cfg,
                                  std::size_t window, const EvaluationOptions& opts = {}) {
  ScoreTable table{methods, presets, {}};
  std::vector<std::vector<std::future<ScoreCell>>> pending(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < presets.size(); ++j) {
      pending[i].push_back(std::async(std::launch::async, [&, i, j] {
        ScoreCell cell;
        try {
          cell.report = rolling_window_evaluate(panel, presets[j], methods[i], cfg, window, opts);
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        return cell;
      }));
    }
  }
  for (auto& row : pending) {
    auto& out = table.cells.emplace_back();
    for (auto& f : row) out.push_back(f.get());
  }
  return table;
}

/// Long-format report: method,preset,score,periods,variant,runtime_seconds.
/// With `include_runtime` false the runtime column is written as 0 so the file
/// is reproducible byte for byte.
inline void write_report_csv(std::ostream& os, const ScoreTable& table, bool include_runtime) {
  os << "method,preset,score,periods,variant,runtime_seconds\n";
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    for (std::size_t j = 0; j < table.presets.size(); ++j) {
      const auto& cell = table.cells[i][j];
      os << method_name(table.methods[i]) << ',' << table.presets[j].name << ',';
      if (cell.report) {
        const auto& r = *cell.report;
        os << csv::format_double(r.score) << ',' << r.per_period_losses.size() << ','
           << r.variant << ',' << csv::format_double(include_runtime ? r.runtime_seconds : 0.0);
      } else {
        os << "failed,0,,0";
      }
      os << '\n';
    }
  }
}

/// Wide table: one row per method, one score column per preset.
inline void write_score_table_csv(std::ostream& os, const ScoreTable& table) {
  os << "method";
  for (const auto& p : table.presets) os << ',' << p.name;
  os << '\n';
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    os << method_name(table.methods[i]);
    for (const auto& cell : table.cells[i]) {
      os << ',' << (cell.report ? csv::format_double(cell.report->score) : std::string("failed"));
    }
    os << '\n';
  }
}

/// Per-period losses: t,date,loss.
inline void write_period_csv(std::ostream& os, const EvaluationReport& rep) {
  os << "t,date,loss\n";
  for (std::size_t k = 0; k < rep.per_period_losses.size(); ++k) {
    os << rep.periods[k] << ',' << rep.dates[k] << ',' << csv::format_double(rep.per_period_losses[k])
       << '\n';
  }
}

}  // namespace simplex_langevin
