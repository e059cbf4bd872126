#pragma once

#include "quorumsim/gamma.hpp"
#include "quorumsim/trace.hpp"

#include <span>
#include <string>

namespace quorumsim {

// Nearest-rank percentile: the ceil(q/100 * n)-th smallest sample.
// q in (0, 100]; empty input is an error.
DurationUs percentile(std::span<const DurationUs> samples, double q);

struct KindStats {
    std::size_t count = 0;
    double mean_us = 0.0;
    DurationUs p50_us = 0;
    DurationUs p95_us = 0;
    DurationUs p99_us = 0;
    DurationUs max_us = 0;
};

struct LatencyStats {
    KindStats read;
    KindStats write;
};

// Latency per op is response - invoke, inclusive of injected policy delays.
LatencyStats summarize(std::span<const OperationRecord> ops);

// Mean over hosts of per-host 95th-percentile latency for one op kind, the
// averaging mode the measurement hosts would report. Clients map to hosts as
// client_id mod hosts; records with client_id < 0 are skipped.
double per_host_p95_avg(std::span<const OperationRecord> ops, OpKind kind,
                        int hosts);

// Service-level agreement: read p95 at most l_ms, stale-read fraction at
// most x.
struct SlaSpec {
    double l_ms = 8.0;
    double x = 0.01;
};

struct SlaVerdict {
    bool latency_pass = false;
    bool staleness_pass = false;

    bool pass() const noexcept { return latency_pass && staleness_pass; }
};

// Each clause is judged separately. The staleness clause uses the
// read-weighted positive proportion (the SLA speaks of reads, not values).
SlaVerdict sla_check(const LatencyStats& stats, const ScoreReport& score,
                     const SlaSpec& sla);

struct RunReport {
    std::string config_digest;
    std::uint64_t seed = 0;
    LatencyStats latency;
    double throughput_ops_per_s = 0.0;
    bool throughput_shortfall = false;
    ScoreReport gamma;
    SlaSpec sla;
    SlaVerdict verdict;
    bool per_host_mode = false;
    double read_p95_per_host_avg_us = 0.0;
    double write_p95_per_host_avg_us = 0.0;
};

std::string to_json(const RunReport& report);
std::string to_json(const ScoreReport& report);

} // namespace quorumsim
