// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "ssou/density_kernel.hpp"
#include "ssou/mc.hpp"

using namespace ssou;

namespace {

std::vector<double> residual_grid(std::size_t n) {
    RngStream rng(7);
    return sample(StableParams{1.5, 0.5, 1.0, 0.0}, n, rng);
}

void BM_DensityBatch(benchmark::State& state, bool parallel) {
    const auto kernel = density_kernel(1.5, 0.5);
    const auto x = residual_grid(static_cast<std::size_t>(state.range(0)));
    std::vector<DensityEval> out(x.size());
    for (auto _ : state) {
        if (parallel)
            kernel->eval_batch(x.data(), x.size(), DensityOrder::Second, out.data());
        else
            kernel->eval_batch_serial(x.data(), x.size(), DensityOrder::Second, out.data());
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarlo(benchmark::State& state, bool parallel) {
    MCConfig c;
    c.n_list = {static_cast<int>(state.range(0))};
    c.L = 8;
    c.methods = {Method::Qmle};
    c.studentize = false;
    for (auto _ : state) {
        const MCReport r = parallel ? run_mc(c) : run_mc_serial(c);
        benchmark::DoNotOptimize(r.records.data());
    }
    state.SetItemsProcessed(state.iterations() * c.L);
}

}  // namespace

BENCHMARK_CAPTURE(BM_DensityBatch, serial, false)->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(BM_DensityBatch, openmp, true)->Arg(2000)->Arg(20000);
BENCHMARK_CAPTURE(BM_MonteCarlo, serial, false)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, openmp, true)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
