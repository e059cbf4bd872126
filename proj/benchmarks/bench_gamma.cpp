#include "quorumsim/gamma.hpp"
#include "quorumsim/rng.hpp"

#include <benchmark/benchmark.h>

using namespace quorumsim;

namespace {

// A trace shaped like simulator output: per key, a chain of writes each
// followed by a few reads, with occasional stale stragglers.
Trace synthetic_trace(std::int64_t keys, std::int64_t values_per_key)
{
    Trace trace;
    RngStream rng(7, "bench.gamma");
    std::int64_t id = 0;
    for (std::int64_t key = 0; key < keys; ++key) {
        std::int64_t t = 0;
        for (std::int64_t v = 0; v < values_per_key; ++v) {
            const std::int64_t value = key * values_per_key + v + 1;
            OperationRecord write;
            write.op_id = id++;
            write.key = key;
            write.kind = OpKind::Write;
            write.value_id = value;
            write.invoke = SimTime{t};
            write.response = SimTime{t + 500};
            trace.ops.push_back(write);
            const int reads = 1 + static_cast<int>(rng.next_below(4));
            for (int r = 0; r < reads; ++r) {
                OperationRecord read = write;
                read.op_id = id++;
                read.kind = OpKind::Read;
                read.invoke = SimTime{t + 600 + r * 300};
                read.response = read.invoke + 400;
                // A few reads linger past the next write.
                if (rng.next_below(16) == 0) {
                    read.invoke = read.invoke + 4000;
                    read.response = read.response + 4000;
                }
                trace.ops.push_back(read);
            }
            t += 2000;
        }
    }
    return trace;
}

} // namespace

static void BM_BuildClusters(benchmark::State& state)
{
    const Trace trace = synthetic_trace(state.range(0), 10);
    for (auto _ : state) {
        const auto clusters = build_clusters(trace);
        benchmark::DoNotOptimize(clusters.size());
    }
    state.SetItemsProcessed(state.iterations() * trace.ops.size());
}
BENCHMARK(BM_BuildClusters)->Arg(100)->Arg(1000);

static void BM_PerValueScores(benchmark::State& state)
{
    const Trace trace = synthetic_trace(state.range(0), 10);
    const auto clusters = build_clusters(trace);
    for (auto _ : state) {
        const auto scores = per_value_scores(clusters);
        benchmark::DoNotOptimize(scores.size());
    }
    state.SetItemsProcessed(state.iterations() * clusters.size());
}
BENCHMARK(BM_PerValueScores)->Arg(100)->Arg(1000);

static void BM_MinStretchOracle(benchmark::State& state)
{
    RngStream rng(9, "bench.oracle");
    std::vector<std::vector<OperationRecord>> histories;
    for (int i = 0; i < 64; ++i) {
        std::vector<OperationRecord> ops;
        std::int64_t id = 0;
        for (int w = 0; w < 4; ++w) {
            OperationRecord op;
            op.op_id = id++;
            op.key = 1;
            op.kind = OpKind::Write;
            op.value_id = w + 1;
            op.invoke = SimTime{rng.next_in(0, 40)};
            op.response = op.invoke + rng.next_in(0, 10);
            ops.push_back(op);
            OperationRecord read = op;
            read.op_id = id++;
            read.kind = OpKind::Read;
            read.invoke = SimTime{rng.next_in(0, 40)};
            read.response = read.invoke + rng.next_in(0, 10);
            ops.push_back(read);
        }
        histories.push_back(std::move(ops));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_stretch_oracle(histories[i]));
        i = (i + 1) % histories.size();
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MinStretchOracle);
