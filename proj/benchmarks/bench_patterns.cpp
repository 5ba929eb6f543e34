#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "biphoton/patterns.hpp"
#include "biphoton/synth.hpp"
#include "biphoton/types.hpp"

namespace {

constexpr double kA = 0.13e-3;
constexpr double kB = 0.4e-3;
constexpr double kLambda = 916e-9;

void BM_ClosedFormGrid(benchmark::State& state) {
    const auto grid = biphoton::linspace_grid(-8e-3, 8e-3, state.range(0));
    for (auto _ : state) {
        auto p = biphoton::patterns::biphoton_pattern(grid, kA, kB, kLambda);
        benchmark::DoNotOptimize(p.value.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClosedFormGrid)->Arg(401)->Arg(1601)->Arg(6401);

void BM_PatternMetrics(benchmark::State& state) {
    const auto pattern = biphoton::patterns::biphoton_pattern(
        biphoton::linspace_grid(-8e-3, 8e-3, state.range(0)), kA, kB, kLambda);
    for (auto _ : state) {
        auto m = biphoton::patterns::pattern_metrics(pattern);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_PatternMetrics)->Arg(401)->Arg(1601)->Arg(6401);

void BM_FringeFrequency(benchmark::State& state) {
    const auto pattern = biphoton::patterns::biphoton_pattern(
        biphoton::linspace_grid(-8e-3, 8e-3, state.range(0)), kA, kB, kLambda);
    const double span = pattern.theta.back() - pattern.theta.front();
    const double dth = span / static_cast<double>(pattern.theta.size() - 1);
    for (auto _ : state) {
        auto f = biphoton::patterns::dominant_fringe_frequency(
            pattern.theta, pattern.value, 6.0 / span, 0.5 / dth);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_FringeFrequency)->Arg(401)->Arg(1601);

void BM_FitPattern(benchmark::State& state) {
    const auto pattern = biphoton::patterns::biphoton_pattern(
        biphoton::linspace_grid(-10e-3, 10e-3, 2001), kA, kB, kLambda);
    const auto counts =
        biphoton::synth::simulate_counts(pattern, 500.0, 5.0, 1.0, 12345);
    biphoton::SlitMask mask;
    mask.slit_width = kA;
    mask.slit_separation = kB;
    for (auto _ : state) {
        auto fit = biphoton::synth::fit_pattern(counts, mask);
        benchmark::DoNotOptimize(fit);
    }
}
BENCHMARK(BM_FitPattern);

} // namespace

BENCHMARK_MAIN();
