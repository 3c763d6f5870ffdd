#include <benchmark/benchmark.h>

#include <retroscatter/billiard.hpp>
#include <retroscatter/cavity.hpp>

using namespace retroscatter;

namespace
{
Cavity const& figure_cavity()
{
    static Cavity c = build_cavity(Involution({1, 4, 3, 2, 5}), 2.5, 0.4);
    return c;
}

void BM_TraceHalfDisc(benchmark::State& state)
{
    Cavity c = make_half_disc(double(state.range(0)));
    double phi = 0.1;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(trace_return(c, 0.1, phi));
        phi = phi > 1.4 ? -1.4 : phi + 0.013;
    }
}
BENCHMARK(BM_TraceHalfDisc)->Arg(5)->Arg(100);

void BM_TraceReflectorCavity(benchmark::State& state)
{
    Cavity const& c = figure_cavity();
    double phi = -1.4;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(trace_return(c, 0.05, phi));
        phi = phi > 1.4 ? -1.4 : phi + 0.0137;
    }
}
BENCHMARK(BM_TraceReflectorCavity);

void BM_Ensemble(benchmark::State& state)
{
    Cavity const& c = figure_cavity();
    SamplingScheme scheme{std::uint64_t(state.range(0)), SamplingScheme::Generator::lambda_importance, 7};
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(scatter_ensemble(c, scheme, {default_max_bounces, 1}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ensemble)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_BuildCavity(benchmark::State& state)
{
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(build_cavity(Involution({1, 4, 3, 2, 5}), 2.5, 0.4));
    }
}
BENCHMARK(BM_BuildCavity)->Unit(benchmark::kMillisecond);
}  // namespace
