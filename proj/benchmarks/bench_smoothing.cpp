#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "homog/approx.hpp"
#include "homog/fields.hpp"

using namespace homog;

static void BM_Smooth(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const double eps = 1.0 / static_cast<double>(state.range(1));
  const auto u0 = grid::sample(m, grid::BoundaryTag::free, [](Vec2 x) {
    return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y);
  });
  const auto ext = approx::extend(u0, approx::default_padding(eps));
  for (auto _ : state) {
    auto s = approx::smooth(ext, eps);
    benchmark::DoNotOptimize(s.values.data());
  }
  state.SetItemsProcessed(state.iterations() * (m + 1) * (m + 1));
}
BENCHMARK(BM_Smooth)->Args({256, 8})->Args({256, 16})->Args({512, 8})
    ->Unit(benchmark::kMillisecond);

static void BM_MeanValue(benchmark::State& state) {
  const double r_max = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto est = fields::mean_value_of(
        [](Vec2 y) { return std::cos(2.0 * std::numbers::pi * y.x); }, r_max, 4);
    benchmark::DoNotOptimize(est.value);
  }
}
BENCHMARK(BM_MeanValue)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
