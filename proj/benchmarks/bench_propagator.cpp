#include <benchmark/benchmark.h>

#include "biphoton/propagator.hpp"
#include "biphoton/types.hpp"

namespace {

biphoton::OpticalSetup bench_setup(int points) {
    biphoton::OpticalSetup s;
    s.source.pump_wavelength = 458e-9;
    s.source.signal_wavelength = 916e-9;
    s.source.idler_wavelength = 916e-9;
    s.source.emission_spread = 5e-3;
    s.source.pump_beam_width = 2e-3;
    s.source.pair_amplitude = 0.05;
    s.mask.slit_width = 0.13e-3;
    s.mask.slit_separation = 0.4e-3;
    s.mask.n_slits = 2;
    s.mask.distance_from_crystal = 2.5e-3;
    s.detection.theta_grid = biphoton::linspace_grid(-8e-3, 8e-3, points);
    s.detection.photon_number = 2;
    s.detection.propagation_distance = 4.0;
    return s;
}

void BM_JointAmplitude(benchmark::State& state) {
    const auto setup = bench_setup(3);
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto a = biphoton::propagator::joint_amplitude(setup, 2e-3, order);
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_JointAmplitude)->Arg(16)->Arg(64)->Arg(256);

void BM_NumericPattern(benchmark::State& state) {
    const auto setup = bench_setup(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto r = biphoton::propagator::coincidence_pattern_numeric(setup);
        benchmark::DoNotOptimize(r.pattern.value.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NumericPattern)->Arg(161)->Arg(801)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
    const auto setup = bench_setup(161);
    const auto samples = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto r = biphoton::propagator::monte_carlo_pattern(setup, samples, 7);
        benchmark::DoNotOptimize(r.pattern.value.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}
BENCHMARK(BM_MonteCarlo)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

} // namespace
