#include "quorumsim/experiment.hpp"

#include <benchmark/benchmark.h>

using namespace quorumsim;

// End-to-end: a 1-second desk-scale run including load phase and analysis.
static void BM_ExperimentRun(benchmark::State& state)
{
    ExperimentConfig config;
    config.set("wl.duration_s", "1");
    config.set("wl.keyspace", "500");
    for (auto _ : state) {
        const auto artifacts = run_experiment(config);
        benchmark::DoNotOptimize(artifacts.report.throughput_ops_per_s);
    }
    state.SetItemsProcessed(state.iterations() * 2000); // ops per run
}
BENCHMARK(BM_ExperimentRun)->Unit(benchmark::kMillisecond);
