// Parallel kernels against their serial references.
//   ./freespec_bench --benchmark_filter=Sweep
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "freespec/freeprob.hpp"
#include "freespec/sweep.hpp"

using namespace freespec;

namespace {

const MpParams kUnit{1.0, 1.0};

std::vector<Complex> line(int points) {
    std::vector<Complex> out;
    for (double x : uniform_grid(-4.0, 4.0, points)) out.emplace_back(x, 1e-3);
    return out;
}

// One grid point of the P1 density: a subordination solve.
Complex p1_point(Complex z) { return p1_transform(kUnit, kUnit, z).g(0, 0); }

void BM_SweepSerial(benchmark::State& state) {
    const auto points = line(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(points, p1_point));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepParallel(benchmark::State& state) {
    const auto points = line(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sweep_parallel(points, p1_point));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EsdSerial(benchmark::State& state) {
    const auto x = sample_gaussian_matrix(state.range(0), state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(esd_eigenvalues_serial(x, 10, kDefaultEta, 2));
}

void BM_EsdParallel(benchmark::State& state) {
    const auto x = sample_gaussian_matrix(state.range(0), state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(esd_eigenvalues(x, 10, kDefaultEta, 2));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EsdSerial)->Arg(118)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EsdParallel)->Arg(118)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
