// Command-line front end: single optimizations, method comparisons, seed
// sweeps, noise diagnostics and rolling-window portfolio evaluation. All
// outputs are CSV files written under --out.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simplex_langevin/simplex_langevin.hpp"

namespace fs = std::filesystem;
namespace sl = simplex_langevin;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string objective;
  std::string returns;
  std::vector<std::string> methods;
  std::vector<std::string> presets;
  double eps = 0.0;
  double beta = 0.0;
  std::size_t iters = 0;
  std::uint64_t seed = 0;
  double floor = sl::kDefaultFloor;
  std::size_t resample_limit = 16;
  std::string init = "paper";
  std::size_t window = sl::kDefaultWindow;
  std::string out = ".";
  std::size_t samples = 1000000;
  std::size_t seeds = 20;
  std::size_t dim = 3;
  std::string variant = "literal";
  bool no_warm_start = false;
  bool timing = false;

  // Set after parsing: which numeric flags were given explicitly (on the
  // command line, in the environment or in a config file).
  bool has_eps = false, has_beta = false, has_iters = false, has_floor = false,
       has_init = false, has_window = false;
};

// Defaults when the user did not override them.
constexpr double kPortfolioEps = 0.5;
constexpr double kPortfolioBeta = 1e6;
constexpr double kPortfolioFloor = 1e-4;
constexpr std::size_t kFunctionIters = 10000;
constexpr std::size_t kPortfolioIters = 500;

std::optional<int> test_function_id(const std::string& name) {
  if (name.size() == 2 && (name[0] == 'f' || name[0] == 'F') && name[1] >= '1' && name[1] <= '6') {
    return name[1] - '0';
  }
  return std::nullopt;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw UsageError("--init: cannot parse '" + cell + "' as a number");
    }
  }
  return v;
}

std::vector<sl::Method> resolve_methods(const Options& o, std::vector<sl::Method> fallback) {
  if (o.methods.empty()) return fallback;
  std::vector<sl::Method> out;
  for (const auto& m : o.methods) out.push_back(sl::parse_method(m));
  return out;
}

sl::ReturnPanel read_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open returns file '" + path + "'");
  return sl::load_returns(in);
}

/// The objective of optimize/compare/sweep together with its preset defaults.
struct Problem {
  std::optional<sl::Objective> objective;
  std::optional<sl::BenchmarkSetting> setting;  // for f1..f6
};

Problem resolve_problem(const Options& o) {
  Problem p;
  if (!o.objective.empty() && !o.returns.empty()) {
    throw UsageError("give either --objective or --returns, not both");
  }
  if (auto id = test_function_id(o.objective)) {
    p.objective = sl::test_function(*id);
    p.setting = sl::benchmark_setting(*id);
  } else if (!o.returns.empty()) {
    if (o.presets.size() > 1) throw UsageError("optimizing a portfolio takes a single --preset");
    const auto preset = o.presets.empty() ? sl::risk_preset(sl::PresetId::MV)
                                          : sl::parse_preset(o.presets.front());
    const auto panel = read_panel(o.returns);
    p.objective = sl::portfolio_objective(sl::PortfolioLoss(panel.returns, preset.lambdas),
                                          "portfolio-" + preset.name);
  } else if (o.objective.empty()) {
    throw UsageError("--objective (f1..f6) or --returns is required");
  } else {
    throw UsageError("unknown objective '" + o.objective + "' (expected f1..f6)");
  }
  return p;
}

sl::ProductPoint resolve_init(const Options& o, const Problem& p) {
  const auto& dims = p.objective->block_dims();
  std::string init = o.init;
  if (!o.has_init && !p.setting) init = "uniform";
  if (init == "uniform") return sl::ProductPoint::uniform(dims);
  if (init == "paper") {
    if (!p.setting) throw UsageError("--init paper is only defined for f1..f6");
    return sl::ProductPoint::from_flat(p.setting->init, dims);
  }
  return sl::ProductPoint::from_flat(parse_point(init), dims);
}

/// Config for `method` on problem `p`: explicit flags win, then the
/// benchmark's published settings, then built-in defaults.
sl::LmwuConfig resolve_config(const Options& o, const Problem& p, sl::Method method) {
  sl::LmwuConfig cfg;
  cfg.seed = o.seed;
  cfg.resample_limit = o.resample_limit;
  const bool langevin = method == sl::Method::LMWU || method == sl::Method::ProjLangevin;
  if (p.setting) {
    cfg.eps = langevin ? p.setting->lmwu_eps : p.setting->mwu_eps;
    cfg.beta = p.setting->betas.back();
    cfg.max_iters = kFunctionIters;
    cfg.floor = sl::kDefaultFloor;
  } else {
    cfg.eps = kPortfolioEps;
    cfg.beta = kPortfolioBeta;
    cfg.max_iters = kPortfolioIters;
    cfg.floor = kPortfolioFloor;
  }
  if (o.has_eps) cfg.eps = o.eps;
  if (o.has_beta) cfg.beta = o.beta;
  if (o.has_iters) cfg.max_iters = o.iters;
  if (o.has_floor) cfg.floor = o.floor;
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
}

std::string format_point(const std::vector<double>& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += sl::csv::format_double(x[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------

int cmd_optimize(const Options& o) {
  const Problem p = resolve_problem(o);
  const auto methods = resolve_methods(o, {sl::Method::LMWU});
  if (methods.size() != 1) throw UsageError("optimize takes a single --method");
  const auto cfg = resolve_config(o, p, methods.front());
  const auto init = resolve_init(o, p);
  ensure_dir(o.out);

  const auto traj = sl::run_optimizer(methods.front(), *p.objective, init, cfg);
  std::ostringstream csv;
  sl::csv::write_trajectory(csv, traj);
  write_file(fs::path(o.out) / "trajectory.csv", csv.str());

  const auto& last = traj.back();
  std::cout << "method " << sl::method_name(methods.front()) << " on " << p.objective->name()
            << " after " << last.iter << " iterations\n"
            << "final f = " << sl::csv::format_double(last.f_value) << '\n'
            << "final x = " << format_point(last.point) << '\n';
  return 0;
}

int cmd_compare(const Options& o) {
  const Problem p = resolve_problem(o);
  const auto methods = resolve_methods(o, {sl::Method::LinearMWU, sl::Method::LMWU});
  const auto init = resolve_init(o, p);
  ensure_dir(o.out);

  std::vector<std::future<sl::Trajectory>> runs;
  for (auto m : methods) {
    const auto cfg = resolve_config(o, p, m);
    runs.push_back(std::async(std::launch::async, [&p, &init, m, cfg] {
      return sl::run_optimizer(m, *p.objective, init, cfg);
    }));
  }
  std::ostringstream summary;
  summary << "method,final_f,best_f,iters\n";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto traj = runs[i].get();
    std::ostringstream csv;
    sl::csv::write_trajectory(csv, traj);
    const std::string name(sl::method_name(methods[i]));
    write_file(fs::path(o.out) / ("trajectory_" + name + ".csv"), csv.str());
    double best = traj.front().f_value;
    for (const auto& r : traj) best = std::min(best, r.f_value);
    summary << name << ',' << sl::csv::format_double(traj.back().f_value) << ','
            << sl::csv::format_double(best) << ',' << traj.back().iter << '\n';
    std::cout << name << ": final f = " << sl::csv::format_double(traj.back().f_value)
              << ", best f = " << sl::csv::format_double(best) << '\n';
  }
  write_file(fs::path(o.out) / "summary.csv", summary.str());
  return 0;
}

int cmd_sweep(const Options& o) {
  const Problem p = resolve_problem(o);
  const auto methods = resolve_methods(o, {sl::Method::LMWU});
  const auto init = resolve_init(o, p);
  if (o.seeds == 0) throw UsageError("--seeds must be positive");
  ensure_dir(o.out);

  struct Outcome {
    std::optional<sl::RunSummary> summary;
    std::string error;
  };
  std::vector<std::future<Outcome>> runs;
  std::vector<std::pair<sl::Method, std::uint64_t>> keys;
  for (auto m : methods) {
    for (std::size_t s = 0; s < o.seeds; ++s) {
      auto cfg = resolve_config(o, p, m);
      cfg.seed = o.seed + s;
      keys.emplace_back(m, cfg.seed);
      runs.push_back(std::async(std::launch::async, [&p, &init, m, cfg] {
        Outcome out;
        try {
          out.summary = sl::run_to_end(m, *p.objective, init, cfg);
        } catch (const sl::StepFailure& e) {
          out.error = e.what();
        }
        return out;
      }));
    }
  }
  std::ostringstream csv;
  csv << "method,seed,final_f,best_f,clamped_steps,resampled_steps\n";
  bool failed = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto r = runs[i].get();
    csv << sl::method_name(keys[i].first) << ',' << keys[i].second << ',';
    if (r.summary) {
      csv << sl::csv::format_double(r.summary->final_f) << ','
          << sl::csv::format_double(r.summary->best_f) << ',' << r.summary->clamped_steps << ','
          << r.summary->resampled_steps << '\n';
    } else {
      failed = true;
      csv << "failed,failed,0,0\n";
      std::cerr << sl::method_name(keys[i].first) << " seed " << keys[i].second << ": "
                << r.error << '\n';
    }
  }
  write_file(fs::path(o.out) / "sweep.csv", csv.str());
  return failed ? kExitRuntime : 0;
}

int cmd_noise_check(const Options& o) {
  if (o.samples < 10000) throw UsageError("--samples must be at least 10000");
  std::vector<double> coords;
  if (o.init == "uniform" || (!o.has_init && o.objective.empty())) {
    if (o.dim < 2) throw UsageError("--dim must be at least 2");
    coords.assign(o.dim, 1.0 / static_cast<double>(o.dim));
  } else if (o.init == "paper") {
    auto id = test_function_id(o.objective);
    if (!id) throw UsageError("--init paper needs --objective f1..f6");
    coords = sl::benchmark_setting(*id).init;
  } else {
    coords = parse_point(o.init);
  }
  const sl::SimplexPoint x(coords);
  const double eps = o.has_eps ? o.eps : 0.1;
  const double beta = o.has_beta ? o.beta : 1.0;
  if (!(eps > 0.0) || !(beta > 0.0)) throw UsageError("--eps and --beta must be positive");
  ensure_dir(o.out);

  sl::Rng rng(o.seed);
  const auto rep = sl::noise_moments(x, eps, beta, o.samples, rng, o.floor);

  std::ostringstream csv;
  csv << "coord,x,drift,mean,mean_z,expected_var,var,var_z\n";
  for (std::size_t i = 0; i < rep.coords.size(); ++i) {
    const auto& c = rep.coords[i];
    csv << i + 1 << ',' << sl::csv::format_double(c.x) << ',' << sl::csv::format_double(c.drift)
        << ',' << sl::csv::format_double(c.mean) << ',' << sl::csv::format_double(c.mean_z) << ','
        << sl::csv::format_double(c.expected_var) << ',' << sl::csv::format_double(c.var) << ','
        << sl::csv::format_double(c.var_z) << '\n';
  }
  write_file(fs::path(o.out) / "noise_check.csv", csv.str());
  std::cout << csv.str();
  const bool pass = rep.max_abs_z() < 4.0;
  std::cout << (pass ? "PASS" : "FAIL") << ": max |z| = " << rep.max_abs_z() << " over "
            << rep.samples << " draws\n";
  return pass ? 0 : kExitRuntime;
}

int cmd_portfolio(const Options& o) {
  if (o.returns.empty()) throw UsageError("portfolio needs --returns");
  const auto panel = read_panel(o.returns);
  std::vector<sl::RiskPreset> presets;
  if (o.presets.empty() || (o.presets.size() == 1 && o.presets.front() == "all")) {
    presets = sl::all_presets();
  } else {
    for (const auto& name : o.presets) presets.push_back(sl::parse_preset(name));
  }
  const auto methods = resolve_methods(
      o, {sl::Method::LinearMWU, sl::Method::ExpMWU, sl::Method::ProjLangevin, sl::Method::LMWU});
  const Problem none;
  sl::LmwuConfig cfg = resolve_config(o, none, sl::Method::LMWU);
  sl::EvaluationOptions opts;
  opts.variant = sl::parse_variant(o.variant);
  opts.warm_start = !o.no_warm_start;
  if (o.window < 2 || o.window >= panel.periods()) {
    throw UsageError("--window must satisfy 2 <= L < T (T = " + std::to_string(panel.periods()) +
                     ")");
  }
  cfg.validate(panel.assets());
  ensure_dir(o.out);

  const auto table = sl::compare_methods(panel, presets, methods, cfg, o.window, opts);
  std::ostringstream report, scores;
  sl::write_report_csv(report, table, o.timing);
  sl::write_score_table_csv(scores, table);
  write_file(fs::path(o.out) / "report.csv", report.str());
  write_file(fs::path(o.out) / "scores.csv", scores.str());
  bool failed = false;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < presets.size(); ++j) {
      const auto& cell = table.cells[i][j];
      if (!cell.report) {
        failed = true;
        std::cerr << sl::method_name(methods[i]) << '/' << presets[j].name << ": " << cell.error
                  << '\n';
        continue;
      }
      std::ostringstream per;
      sl::write_period_csv(per, *cell.report);
      write_file(fs::path(o.out) / ("periods_" + std::string(sl::method_name(methods[i])) + "_" +
                                    presets[j].name + ".csv"),
                 per.str());
    }
  }
  std::cout << scores.str();
  return failed ? kExitRuntime : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Langevin multiplicative weights update over products of simplices"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value (INI/TOML) file");

  Options o;
  auto* eps = app.add_option("--eps", o.eps, "Step size");
  auto* beta = app.add_option("--beta", o.beta, "Inverse temperature");
  auto* iters = app.add_option("--iters", o.iters, "Iterations per run (per window for portfolio)");
  app.add_option("--seed", o.seed, "Random seed")->envname("SIMPLEX_LANGEVIN_SEED");
  auto* floor = app.add_option("--floor", o.floor, "Positivity floor for coordinates");
  app.add_option("--resample-limit", o.resample_limit, "Noise redraws before clamping")
      ->check(CLI::PositiveNumber);
  auto* init = app.add_option("--init", o.init, "Initial point: paper, uniform or x1,x2,...");
  app.add_option("--objective", o.objective, "Benchmark function f1..f6");
  app.add_option("--returns", o.returns, "Returns CSV (date,<asset1>,...)");
  app.add_option("--method", o.methods, "lmwu, linear-mwu, exp-mwu, proj-langevin")->delimiter(',');
  app.add_option("--preset", o.presets,
                 "Risk preset(s): increasing, degenerate, mv, mvs, mvsk, equal, all")
      ->delimiter(',');
  auto* window = app.add_option("--window", o.window, "Rolling window length L");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--samples", o.samples, "Noise draws for noise-check");
  app.add_option("--seeds", o.seeds, "Number of consecutive seeds for sweep");
  app.add_option("--dim", o.dim, "Dimension of the uniform point for noise-check");
  app.add_option("--variant", o.variant, "Out-of-sample loss: literal or window-moments");
  app.add_flag("--no-warm-start", o.no_warm_start, "Fit every window from the uniform portfolio");
  app.add_flag("--timing", o.timing, "Record measured runtimes in report.csv");

  auto* optimize = app.add_subcommand("optimize", "Run one optimizer and write trajectory.csv");
  auto* compare = app.add_subcommand("compare", "Run several methods from one start");
  auto* sweep = app.add_subcommand("sweep", "Run consecutive seeds and write sweep.csv");
  auto* portfolio = app.add_subcommand("portfolio", "Rolling-window out-of-sample evaluation");
  auto* noise = app.add_subcommand("noise-check", "Compare noise moments with their analytic values");
  for (auto* sub : {optimize, compare, sweep, portfolio, noise}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  o.has_eps = eps->count() > 0;
  o.has_beta = beta->count() > 0;
  o.has_iters = iters->count() > 0;
  o.has_floor = floor->count() > 0;
  o.has_init = init->count() > 0;
  o.has_window = window->count() > 0;

  try {
    if (optimize->parsed()) return cmd_optimize(o);
    if (compare->parsed()) return cmd_compare(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (portfolio->parsed()) return cmd_portfolio(o);
    return cmd_noise_check(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sl::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sl::StepFailure& e) {
    std::cerr << "step failure: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
