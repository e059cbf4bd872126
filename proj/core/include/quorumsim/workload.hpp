#pragma once

#include "quorumsim/policy.hpp"
#include "quorumsim/rng.hpp"
#include "quorumsim/store.hpp"
#include "quorumsim/trace.hpp"

#include <cstdint>
#include <string>

namespace quorumsim {

// Key sampling distributions. Latest uses standard YCSB semantics: a
// zipfian over recency rank, skewing to the most recently inserted keys;
// with the keyspace fixed after the load phase that means the highest
// indices. Hotspot's hot set is the first ceil(hot_fraction*n) keys.
struct KeyDistribution {
    enum class Kind { Uniform, Zipfian, Latest, Hotspot };

    static KeyDistribution uniform(std::int64_t n);
    static KeyDistribution zipfian(std::int64_t n, double theta = 0.99);
    static KeyDistribution latest(std::int64_t n, double theta = 0.99);
    static KeyDistribution hotspot(std::int64_t n, double hot_fraction = 0.2,
                                   double hot_op_fraction = 0.8);

    std::int64_t sample(RngStream& rng) const;

    Kind kind = Kind::Latest;
    std::int64_t n = 1000;
    double theta = 0.99;
    double hot_fraction = 0.2;
    double hot_op_fraction = 0.8;

private:
    // Zipfian constants (Gray et al. generator, as used by YCSB).
    double zetan_ = 0.0;
    double zeta2_ = 0.0;
    double alpha_ = 0.0;
    double eta_ = 0.0;

    std::int64_t zipf_rank(RngStream& rng) const;
    void precompute();
};

OpKind next_op_kind(double read_fraction, RngStream& rng);

struct WorkloadConfig {
    double read_fraction = 0.8;
    int value_size_bytes = 128; // informational; payloads are modeled, not stored
    int clients_per_host = 128;
    double target_ops_per_host_per_s = 5000.0;
    double duration_s = 60.0;
    KeyDistribution dist = KeyDistribution::latest(1000);
    DurationUs clock_skew_bound_us = 0;

    void validate() const;
};

struct WorkloadResult {
    Trace trace; // load phase followed by transaction phase, by op_id
    std::size_t load_ops = 0;
    std::size_t txn_ops = 0;
    std::int64_t first_txn_op_id = 0;
    SimTime txn_start{};
    SimTime txn_end{};
    double achieved_ops_per_s = 0.0;
    bool throughput_shortfall = false;
};

// Drives one experiment against a cluster: a load phase writing every key
// once (so the analyzer needs no synthetic writes), a quiescence point, then
// closed-loop clients throttled to the target rate for the transaction
// phase. Dispatch targets form a fixed per-client grid; a late response
// never shifts the grid, the client just catches up.
//
// Clock skew models recording error only: each client's records are shifted
// by a fixed offset drawn uniformly from [-bound, +bound]. Simulation
// behavior is unaffected.
WorkloadResult run_workload(SimKernel& kernel, ClusterSim& cluster,
                            const WorkloadConfig& config,
                            const PolicySpec& policy, std::uint64_t seed);

} // namespace quorumsim
