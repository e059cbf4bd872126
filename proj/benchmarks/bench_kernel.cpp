#include "quorumsim/kernel.hpp"

#include <benchmark/benchmark.h>

using namespace quorumsim;

static void BM_KernelScheduleDispatch(benchmark::State& state)
{
    const auto events = static_cast<std::int64_t>(state.range(0));
    for (auto _ : state) {
        SimKernel kernel;
        std::int64_t fired = 0;
        for (std::int64_t i = 0; i < events; ++i) {
            // Scatter deterministically to exercise heap reordering.
            kernel.schedule_at(SimTime{(i * 7919) % 100000},
                               [&fired] { ++fired; });
        }
        kernel.run_until_idle();
        benchmark::DoNotOptimize(fired);
    }
    state.SetItemsProcessed(state.iterations() * events);
}
BENCHMARK(BM_KernelScheduleDispatch)->Arg(1000)->Arg(100000);

static void BM_KernelCascade(benchmark::State& state)
{
    // Each event schedules its successor; measures dispatch overhead alone.
    const auto depth = static_cast<std::int64_t>(state.range(0));
    for (auto _ : state) {
        SimKernel kernel;
        std::int64_t remaining = depth;
        std::function<void()> step = [&] {
            if (--remaining > 0) {
                kernel.schedule_after(1, step);
            }
        };
        kernel.schedule_after(1, step);
        kernel.run_until_idle();
        benchmark::DoNotOptimize(remaining);
    }
    state.SetItemsProcessed(state.iterations() * depth);
}
BENCHMARK(BM_KernelCascade)->Arg(100000);
