#include <benchmark/benchmark.h>

#include "homog/cell.hpp"

using namespace homog;

namespace {

fields::CoefficientField laminate_field() {
  fields::ScalarExpr a = fields::ScalarExpr::constant(2.0);
  a.add_trig(1.0, 1.0, 0.0);
  return fields::CoefficientField::isotropic(a, fields::Structure::periodic, 1.0,
                                             3.0);
}

}  // namespace

static void BM_CellAssembly(benchmark::State& state) {
  const auto A = laminate_field();
  const cell::PeriodicGrid grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto k = cell::assemble_cell_stiffness(A, grid);
    benchmark::DoNotOptimize(k.values().data());
  }
  state.SetItemsProcessed(state.iterations() * grid.node_count());
}
BENCHMARK(BM_CellAssembly)->Arg(64)->Arg(128)->Arg(256);

static void BM_CellMatVec(benchmark::State& state) {
  const auto A = laminate_field();
  const cell::PeriodicGrid grid(static_cast<int>(state.range(0)));
  const auto k = cell::assemble_cell_stiffness(A, grid);
  std::vector<double> x(grid.node_count(), 1.0), y;
  for (auto _ : state) {
    k.multiply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * k.nonzeros());
}
BENCHMARK(BM_CellMatVec)->Arg(128)->Arg(256);

static void BM_CorrectorSolve(benchmark::State& state) {
  const auto A = laminate_field();
  const cell::PeriodicGrid grid(static_cast<int>(state.range(0)));
  const auto H = [&](Vec2 y) { return A.eval_matrix(y) * Vec2{1.0, 0.0}; };
  for (auto _ : state) {
    auto u = cell::solve_cell_general(A, H, grid);
    benchmark::DoNotOptimize(u.values.data());
  }
}
BENCHMARK(BM_CorrectorSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
