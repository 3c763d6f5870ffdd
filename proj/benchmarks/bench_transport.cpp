#include <benchmark/benchmark.h>

#include <retroscatter/discretize.hpp>
#include <retroscatter/measure.hpp>
#include <retroscatter/transport.hpp>

using namespace retroscatter;

namespace
{
void BM_SolveMin(benchmark::State& state)
{
    int m = int(state.range(0));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(solve_mk({m, TransportProblem::Sense::min}));
    }
}
BENCHMARK(BM_SolveMin)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CellCosts(benchmark::State& state)
{
    int m = int(state.range(0));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(cell_costs(m));
    }
}
BENCHMARK(BM_CellCosts)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ApproximateByInvolution(benchmark::State& state)
{
    MeasureGrid g = mixture({{0.25, nu_zero(8)}, {0.75, nu_star(8)}});
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(approximate_by_involution(g, 1'000'000));
    }
}
BENCHMARK(BM_ApproximateByInvolution);
}  // namespace
