#include <benchmark/benchmark.h>

#include <cmath>

#include "choquard/functionals.hpp"
#include "choquard/solvers.hpp"

using namespace choquard;

namespace {

ProblemParams case_i() {
  ProblemParams pr;
  pr.N = 1;
  pr.s = 0.4;
  pr.mu = 0.5;
  pr.q = 2.0;
  pr.p = 3.0;
  pr.alpha = 0.1;
  return pr;
}

Field bump(const Grid& g) {
  const double w = g.half_length() / 8.0;
  return sample(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int k = 0; k < g.dim(); ++k) r2 += x[k] * x[k];
    return std::exp(-r2 / (2.0 * w * w));
  });
}

void BM_RieszConvolve1d(benchmark::State& state) {
  const Grid g(1, static_cast<int>(state.range(0)), 40.0);
  const SpectralOps ops(g, 0.4, 0.5);
  const Field u = bump(g);
  for (auto _ : state) benchmark::DoNotOptimize(ops.riesz_convolve(u));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_RieszConvolve1d)->RangeMultiplier(4)->Range(1 << 10, 1 << 20);

void BM_RieszConvolve3d(benchmark::State& state) {
  const Grid g(3, static_cast<int>(state.range(0)), 12.0);
  const SpectralOps ops(g, 0.5, 1.0);
  const Field u = bump(g);
  for (auto _ : state) benchmark::DoNotOptimize(ops.riesz_convolve(u));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_RieszConvolve3d)->Arg(32)->Arg(64);

void BM_Gradient(benchmark::State& state) {
  const auto pr = case_i();
  const Grid g(1, static_cast<int>(state.range(0)), 40.0);
  const SpectralOps ops(g, pr.s, pr.mu);
  const Field u = normalize_mass(bump(g), pr.c);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(ops, u, pr));
}
BENCHMARK(BM_Gradient)->RangeMultiplier(4)->Range(1 << 10, 1 << 18);

void BM_FiberAnalyze(benchmark::State& state) {
  const auto pr = case_i();
  const MomentTriple m{1.0, 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(fiber_analyze(m, pr));
}
BENCHMARK(BM_FiberAnalyze);

void BM_LocalMinimize(benchmark::State& state) {
  const auto pr = case_i();
  SolveConfig cfg;
  cfg.grid.M = static_cast<int>(state.range(0));
  cfg.C_q = 0.99933569;
  cfg.C_p = 1.03219712;
  for (auto _ : state) benchmark::DoNotOptimize(local_minimize(pr, cfg));
}
BENCHMARK(BM_LocalMinimize)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
