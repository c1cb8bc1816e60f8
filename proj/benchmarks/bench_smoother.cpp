#include "covsmooth/estimator.hpp"
#include "covsmooth/processes.hpp"
#include "covsmooth/weights.hpp"

#include <benchmark/benchmark.h>

using namespace covsmooth;

namespace {

SmootherConfig config(unsigned m, double h)
{
  SmootherConfig cfg;
  cfg.order = PolyOrder(m);
  cfg.bandwidth = h;
  return cfg;
}

void BM_WeightField(benchmark::State& state)
{
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<unsigned>(state.range(1));
  const auto grid = make_equidistant_grid(p);
  const auto evals = triangle_eval_grid(grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_weight_field(grid, config(m, 0.3), evals));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(evals.size()));
}
BENCHMARK(BM_WeightField)
  ->Args({ 25, 1 })
  ->Args({ 50, 1 })
  ->Args({ 50, 2 })
  ->Args({ 100, 1 })
  ->Unit(benchmark::kMillisecond);

void BM_EmpiricalCovariance(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::size_t>(state.range(1));
  const auto grid = make_equidistant_grid(p);
  const auto y = simulate_ou(n, grid, 3, 2, RngSpec(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(empirical_covariance(y));
}
BENCHMARK(BM_EmpiricalCovariance)
  ->Args({ 100, 50 })
  ->Args({ 400, 50 })
  ->Args({ 400, 100 })
  ->Unit(benchmark::kMicrosecond);

void BM_ApplyField(benchmark::State& state)
{
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto grid = make_equidistant_grid(p);
  const auto field =
    compute_weight_field(grid, config(1, 0.3), triangle_eval_grid(grid));
  const auto z = empirical_covariance(simulate_ou(400, grid, 3, 2, RngSpec(2))).z;
  for (auto _ : state)
    benchmark::DoNotOptimize(field.apply(z));
}
BENCHMARK(BM_ApplyField)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_SimulateOu(benchmark::State& state)
{
  const auto grid = make_equidistant_grid(static_cast<std::size_t>(state.range(1)));
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_ou(n, grid, 3, 2, RngSpec(++seed)));
}
BENCHMARK(BM_SimulateOu)->Args({ 400, 50 })->Args({ 400, 100 })->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
