#pragma once

#include "quorumsim/errors.hpp"
#include "quorumsim/latency_model.hpp"
#include "quorumsim/metrics.hpp"
#include "quorumsim/policy.hpp"
#include "quorumsim/store.hpp"
#include "quorumsim/trace.hpp"
#include "quorumsim/workload.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace quorumsim {

// Flat key=value experiment configuration. Defaults are the desk-scale
// profile (2 hosts, 128 clients, 1 kops/s/host, 10 s); the "paper" profile
// scales to the measured deployment (6 hosts, 768 clients, 5 kops/s/host,
// 60 s). Unknown keys are rejected.
struct ExperimentConfig {
    int hosts = 2;
    int rf = 3;
    std::string read_repair = "none"; // none | async

    LatencyModel net_one_way = LatencyModel::parse("lognormal:175:0.15");
    LatencyModel local_hop = LatencyModel::parse("const:50");
    LatencyModel svc_read = LatencyModel::parse("lognormal:420:0.7");
    LatencyModel svc_write = LatencyModel::parse(
        "empirical:63,78,88,96,103,109,115,120,125,130,135,139,144,148,153,157,162,167,171,176,180,185,190,195,200,205,211,216,222,228,234,240,247,254,261,269,278,287,297,308,320,334,349,367,389,416,453,510,638,6000");

    double wl_read_fraction = 0.8;
    std::string wl_dist = "latest"; // uniform | zipfian | latest | hotspot
    std::int64_t wl_keyspace = 1000;
    int wl_clients = 128; // total, split evenly across hosts
    double wl_target_kops = 1.0; // per host
    double wl_duration_s = 10.0;
    DurationUs wl_skew_us = 0;
    double wl_theta = 0.99;
    double wl_hot_fraction = 0.2;
    double wl_hot_op_fraction = 0.8;
    int wl_value_bytes = 128;

    std::string policy_kind = "fixed"; // fixed | cpq | ad
    std::string policy_read = "one";
    std::string policy_write = "one";
    double policy_p = 0.5;
    std::string policy_low = "one";
    std::string policy_high = "quorum";
    double policy_read_delay_ms = 0.0;
    double policy_write_delay_ms = 0.0;

    DurationUs gamma_threshold_us = 2000;
    bool metrics_per_host = false;
    double sla_l_ms = 8.0;
    double sla_x = 0.01;

    std::uint64_t seed = 42;
    std::string out_trace = "trace.csv";
    std::string out_report = "report.json";

    // Applies one key=value pair; throws ConfigError on unknown keys or
    // unparsable values.
    void set(std::string_view key, std::string_view value);

    void apply_profile(std::string_view name); // desk | paper

    // Applies an INI-style file (key = value lines, '#' comments) on top of
    // the current values.
    void load_file(const std::filesystem::path& path);

    static ExperimentConfig from_file(const std::filesystem::path& path);

    // Canonical key->value view of everything that affects behavior
    // (output paths excluded). The digest hashes this view.
    std::map<std::string, std::string> canonical() const;
    std::string digest() const;

    // Resolution into module configs; throws ConfigError on inconsistency.
    StoreConfig store_config() const;
    NetworkModel network_model() const;
    ServiceModel service_model() const;
    WorkloadConfig workload_config() const;
    PolicySpec policy_spec() const;
    SlaSpec sla_spec() const;
};

struct RunArtifacts {
    Trace trace;
    RunReport report;
    WorkloadResult workload;
    // Internal state captured when requested: the store-level op ledger and
    // a post-quiescence snapshot of every replica.
    std::vector<ClusterSim::LedgerEntry> ledger;
    std::vector<std::map<std::int64_t, Versioned>> replica_snapshots;
};

// One deterministic simulation: load phase, transaction phase, analysis.
// Latency/throughput statistics cover the transaction phase; gamma analysis
// covers the whole trace (the load phase supplies the dictating writes).
RunArtifacts run_experiment(const ExperimentConfig& config,
                            bool capture_internals = false);

// run + write trace CSV and report JSON to the configured paths.
RunArtifacts run_to_files(const ExperimentConfig& config);

struct SweepSpec {
    std::string param;               // e.g. policy.p or policy.read_delay_ms
    std::vector<std::string> values; // nonempty
    int seeds_per_point = 1;         // seeds seed, seed+1, ...
};

struct SweepRow {
    std::string param;
    std::string value;
    std::uint64_t seed = 0;
    double proportion_positive = 0.0;
    DurationUs read_p95_us = 0;
    DurationUs write_p95_us = 0;
    double throughput_ops_per_s = 0.0;
};

// One run per (value, seed); equivalent to independent `run` invocations
// with the parameter overridden.
std::vector<SweepRow> run_sweep(const ExperimentConfig& base,
                                const SweepSpec& spec);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Loads a trace, inserts synthetic initial writes if needed, validates, and
// scores it.
ScoreReport analyze_trace_file(const std::filesystem::path& trace_path,
                               DurationUs threshold_us);

struct OracleKeyResult {
    std::int64_t key = 0;
    std::size_t op_count = 0;
    bool skipped = false;
    DurationUs min_stretch_us = 0;
    DurationUs zone_max_us = 0;
    bool agree = false;
};

// Per-key minimal stretch next to the zone-based scores, for validating the
// analyzer on small traces. Keys over `max_ops` operations are skipped.
std::vector<OracleKeyResult>
oracle_trace_file(const std::filesystem::path& trace_path,
                  std::size_t max_ops = kOracleMaxOps);

} // namespace quorumsim
