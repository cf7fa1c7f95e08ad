#include <benchmark/benchmark.h>

#include "sica/eval.hpp"
#include "sica/hungarian.hpp"
#include "sica/random.hpp"

namespace {

using namespace sica;

Matrix noise(Eigen::Index rows, Eigen::Index cols, Seed seed) {
  Rng rng(seed);
  return standard_normal(rows, cols, rng);
}

void BM_FitPca(benchmark::State& state) {
  const auto k = Eigen::Index(state.range(0));
  const Dataset y(noise(k, 6400, 1));
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(y, std::size_t(k)));
}
BENCHMARK(BM_FitPca)->Arg(9)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_FastIca(benchmark::State& state) {
  SimConfig cfg;
  cfg.seed = 1;
  const SimTruth t = simulate(cfg);
  const PcaFit pca = fit_pca(Dataset(t.observed.patterns(), cfg.grid), cfg.n_sources);
  IcaOptions opts;
  opts.seed = 2;
  for (auto _ : state) benchmark::DoNotOptimize(fastica(pca.components, opts));
}
BENCHMARK(BM_FastIca)->Unit(benchmark::kMillisecond);

void BM_SampleNull(benchmark::State& state) {
  SimConfig cfg;
  cfg.seed = 3;
  const SimTruth t = simulate(cfg);
  const PcaFit pca = fit_pca(Dataset(t.observed.patterns(), cfg.grid), cfg.n_sources);
  for (auto _ : state) benchmark::DoNotOptimize(sample_null(pca.components, std::size_t(state.range(0)), 4));
}
BENCHMARK(BM_SampleNull)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  SimConfig cfg;
  cfg.seed = 5;
  if (state.range(0) != 0) cfg.target_kurtosis = 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Hungarian(benchmark::State& state) {
  const Matrix cost = noise(state.range(0), state.range(0), 6).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost));
}
BENCHMARK(BM_Hungarian)->Arg(9)->Arg(40)->Arg(200);

}  // namespace
BENCHMARK_MAIN();
