#include "quorumsim/latency_model.hpp"

#include <benchmark/benchmark.h>

using namespace quorumsim;

static void BM_SampleLogNormal(benchmark::State& state)
{
    const auto model = LatencyModel::lognormal(175.0, 0.15);
    RngStream rng(1, "bench");
    DurationUs sink = 0;
    for (auto _ : state) {
        sink += model.sample(rng);
    }
    benchmark::DoNotOptimize(sink);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleLogNormal);

static void BM_SampleEmpirical(benchmark::State& state)
{
    const auto model = ServiceModel{}.write_service;
    RngStream rng(1, "bench");
    DurationUs sink = 0;
    for (auto _ : state) {
        sink += model.sample(rng);
    }
    benchmark::DoNotOptimize(sink);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleEmpirical);
