// bench_kernels.cpp: serial reference vs OpenMP paths of the data-parallel kernels

#include <vector>

#include <benchmark/benchmark.h>

#include "rcbound/excitation.hpp"
#include "rcbound/rcmap.hpp"

using namespace rcbound;

namespace {

const SystemParams kSys{0.5, 0.0};

Exec policy(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_Decompose(benchmark::State& state) {
    const auto sf = SpectralFunction::rubin(3.0);
    for (auto _ : state) benchmark::DoNotOptimize(decompose(sf, 400, policy(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_Eigenvalues(benchmark::State& state) {
    const auto m = build_arrowhead(kSys, decompose(SpectralFunction::rubin(3.0), 1500));
    for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(m, policy(state), true));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_Sweep(benchmark::State& state) {
    const auto sf = SpectralFunction::shifted_sum(1.0, 1.0, {0.0, 1.5});
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) grid.push_back(0.25 + 0.4 * i);
    const std::vector<int> counts{100};
    for (auto _ : state) benchmark::DoNotOptimize(sweep(kSys, sf, grid, counts, policy(state)));
    state.SetLabel(state.range(0) ? "parallel" : "serial");
}

} // namespace

BENCHMARK(BM_Decompose)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Eigenvalues)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
