#pragma once

#include "quorumsim/trace.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace quorumsim {

// All operations on one (key, value): the dictating write plus every read
// that returned the value.
struct Cluster {
    std::int64_t key = 0;
    std::int64_t value_id = 0;
    bool has_write = false;
    SimTime write_invoke{};
    SimTime min_response = SimTime::max(); // over all members
    SimTime max_invoke = SimTime::min();   // over all members
    std::size_t read_count = 0;
};

// The span between a cluster's earliest response and latest invoke. Forward
// polarity (latest invoke after earliest response) means the members
// disperse in time and can conflict with sibling values of the key.
struct ClusterZone {
    SimTime low{};  // min response
    SimTime high{}; // max invoke
    bool forward = false;
    SimTime interval_lo{};
    SimTime interval_hi{};
};

class DanglingValueError : public std::runtime_error {
public:
    explicit DanglingValueError(
        std::vector<std::pair<std::int64_t, std::int64_t>> dangling)
        : std::runtime_error(
              "trace has reads of values with no dictating write; run "
              "insert_synthetic_initial_writes first"),
          dangling_(std::move(dangling))
    {
    }

    const std::vector<std::pair<std::int64_t, std::int64_t>>&
    dangling() const noexcept
    {
        return dangling_;
    }

private:
    std::vector<std::pair<std::int64_t, std::int64_t>> dangling_;
};

// One cluster per (key, value_id) in the trace. Every read must have a
// dictating write; otherwise DanglingValueError lists the orphaned values.
std::vector<Cluster> build_clusters(const Trace& trace);

ClusterZone compute_zone(const Cluster& cluster);

using ValueKey = std::pair<std::int64_t, std::int64_t>; // (key, value_id)
using ScoreMap = std::map<ValueKey, DurationUs>;

// Per-value gamma scores, in microseconds. Backward clusters score zero (the
// dictating write plausibly covers all its reads); a forward cluster scores
// the stretch its zone forces against the worst-positioned sibling value on
// the same key, capped by its own zone length. The maximum score over a key
// equals the minimal uniform interval stretch that linearizes the key's
// sub-history, which min_stretch_oracle checks independently.
ScoreMap per_value_scores(const std::vector<Cluster>& clusters);

// Fraction of clusters whose score exceeds the threshold; scores positive
// but at or below the threshold are excluded as clock noise. Empty input is
// defined as 0.
double proportion_positive(const ScoreMap& scores,
                           DurationUs threshold_us = 2000);

struct ScoreReport {
    ScoreMap scores;
    DurationUs threshold_us = 2000;
    std::size_t clusters = 0;
    std::size_t reads = 0;
    std::size_t positive_raw = 0;            // gamma > 0
    std::size_t positive_over_threshold = 0; // gamma > threshold
    DurationUs max_score_us = 0;
    double proportion_positive = 0.0;       // per value (cluster denominator)
    double proportion_positive_reads = 0.0; // read-weighted, for SLA use
};

ScoreReport score_trace(const Trace& trace, DurationUs threshold_us = 2000);

class OracleSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kOracleMaxOps = 12;

// Validation oracle: the minimal stretch (microseconds) such that widening
// every operation interval [s, f] to [s - delta/2, f + delta/2] admits a
// total order of effect points in which each read is most recently preceded
// by the write of its value. Searches the finite candidate set of pairwise
// invoke-response gaps, checking each candidate with an interval-scheduling
// feasibility pass over write orders; accepted placements are re-verified
// against the stretched intervals operation by operation.
//
// All ops must share one key, writes must be unique per value and every read
// value must be written. Refuses histories over kOracleMaxOps operations.
DurationUs min_stretch_oracle(std::span<const OperationRecord> ops);

// For each (key, value) read but never written, inserts a zero-length
// synthetic write at one microsecond before the earliest invoke in the
// trace. Idempotent; synthetic writes take part in clustering and
// reordering exactly like real writes.
Trace insert_synthetic_initial_writes(const Trace& trace);

} // namespace quorumsim
