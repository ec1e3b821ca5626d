#include "srf/optimal.hpp"
#include "srf/parallel.hpp"
#include "srf/separable.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace srf;

void BM_OptimalSerial(benchmark::State& state) {
    OptimalParams p;
    p.n_spins = int(state.range(0));
    p.trials = 2000;
    for (auto _ : state) benchmark::DoNotOptimize(run_optimal_serial(p, 42).stats.rms);
}

void BM_OptimalParallel(benchmark::State& state) {
    OptimalParams p;
    p.n_spins = int(state.range(0));
    p.trials = 2000;
    for (auto _ : state) benchmark::DoNotOptimize(run_optimal(p, 42).stats.rms);
}

double separable_error(std::int64_t, Rng& rng) {
    const SeparableParams params{4096, 5.0};
    return run_separable(params, haar_sample(rng), EveModel::none(), rng).error_angle;
}

void BM_SeparableSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(map_trials_serial<double>(200, 7, separable_error));
}

void BM_SeparableParallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(map_trials<double>(200, 7, Jobs{}, separable_error));
}

void BM_DensityTabulation(benchmark::State& state) {
    const ShapePtr shape = block_shape(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(outcome_density(*shape).total_mass());
}

}  // namespace

BENCHMARK(BM_OptimalSerial)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimalParallel)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparableSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparableParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DensityTabulation)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
