// Runs linear MWU and Langevin MWU on f1 from the same start and prints
// where each one ends up.

#include <cstdio>

#include "simplex_langevin/simplex_langevin.hpp"

namespace sl = simplex_langevin;

int main() {
  const sl::Objective f1 = sl::test_function(1);
  const sl::BenchmarkSetting setting = sl::benchmark_setting(1);
  const auto init = sl::ProductPoint::from_flat(setting.init, f1.block_dims());

  sl::LmwuConfig mwu;
  mwu.eps = setting.mwu_eps;
  mwu.max_iters = 200000;
  auto mwu_run = sl::run_to_end(sl::Method::LinearMWU, f1, init, mwu);

  sl::LmwuConfig lmwu = mwu;
  lmwu.eps = setting.lmwu_eps;
  lmwu.beta = 100;
  double best = mwu_run.final_f;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    lmwu.seed = seed;
    best = std::min(best, sl::run_to_end(sl::Method::LMWU, f1, init, lmwu).final_f);
  }

  std::printf("MWU final f          %.6f\n", mwu_run.final_f);
  std::printf("LMWU best of 20 runs %.6f\n", best);
  std::printf("listed optimum       %.6f\n", f1.known_optimum()->value);
  return 0;
}
