#include "quorumsim/gamma.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace quorumsim {

std::vector<Cluster> build_clusters(const Trace& trace)
{
    std::map<ValueKey, Cluster> by_value;
    for (const auto& op : trace.ops) {
        auto& cluster = by_value[{op.key, op.value_id}];
        cluster.key = op.key;
        cluster.value_id = op.value_id;
        cluster.min_response = std::min(cluster.min_response, op.response);
        cluster.max_invoke = std::max(cluster.max_invoke, op.invoke);
        if (op.kind == OpKind::Write) {
            cluster.has_write = true;
            cluster.write_invoke = op.invoke;
        } else {
            ++cluster.read_count;
        }
    }

    std::vector<std::pair<std::int64_t, std::int64_t>> dangling;
    for (const auto& [vk, cluster] : by_value) {
        if (!cluster.has_write) {
            dangling.push_back(vk);
        }
    }
    if (!dangling.empty()) {
        throw DanglingValueError(std::move(dangling));
    }

    std::vector<Cluster> clusters;
    clusters.reserve(by_value.size());
    for (auto& [vk, cluster] : by_value) {
        clusters.push_back(cluster);
    }
    return clusters;
}

ClusterZone compute_zone(const Cluster& cluster)
{
    ClusterZone zone;
    zone.low = cluster.min_response;
    zone.high = cluster.max_invoke;
    zone.forward = zone.high > zone.low;
    zone.interval_lo = std::min(zone.low, zone.high);
    zone.interval_hi = std::max(zone.low, zone.high);
    return zone;
}

namespace {

// Score one key's clusters. For a forward cluster v the binding conflict
// with a sibling u is min(high_v - low_u, high_u - low_v): the stretch
// needed before u's members can be ordered entirely before or entirely
// after v's span. The own-zone cap reflects that v stops dispersing once its
// zone has been consumed by the stretch.
void score_key(const std::vector<const Cluster*>& clusters, ScoreMap& out)
{
    const std::size_t m = clusters.size();
    struct Entry {
        std::int64_t low;
        std::int64_t high;
        std::int64_t mid;
        const Cluster* cluster;
    };
    std::vector<Entry> entries;
    entries.reserve(m);
    for (const Cluster* c : clusters) {
        entries.push_back(Entry{c->min_response.micros, c->max_invoke.micros,
                                c->min_response.micros + c->max_invoke.micros,
                                c});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.mid < b.mid; });

    constexpr auto kMin = std::numeric_limits<std::int64_t>::min();
    constexpr auto kMax = std::numeric_limits<std::int64_t>::max();

    // prefix_high[i] = max high over entries [0, i); suffix_low[i] = min low
    // over entries [i, m).
    std::vector<std::int64_t> prefix_high(m + 1, kMin);
    std::vector<std::int64_t> suffix_low(m + 1, kMax);
    for (std::size_t i = 0; i < m; ++i) {
        prefix_high[i + 1] = std::max(prefix_high[i], entries[i].high);
    }
    for (std::size_t i = m; i-- > 0;) {
        suffix_low[i] = std::min(suffix_low[i + 1], entries[i].low);
    }

    for (std::size_t i = 0; i < m; ++i) {
        const Entry& e = entries[i];
        const Cluster& c = *e.cluster;
        const std::int64_t zone_len = e.high - e.low;
        DurationUs score = 0;
        if (zone_len > 0) {
            // In midpoint order the sibling before v binds with
            // (high_u - low_v) and the sibling after with (high_v - low_u);
            // each side is the smaller orientation of its pair.
            std::int64_t best = 0;
            if (prefix_high[i] != kMin) {
                best = std::max(best, prefix_high[i] - e.low);
            }
            if (suffix_low[i + 1] != kMax) {
                best = std::max(best, e.high - suffix_low[i + 1]);
            }
            if (c.has_write) {
                // A read responding before its write invokes forces stretch
                // even without siblings.
                best = std::max(best, c.write_invoke.micros - e.low);
            }
            score = std::min(best, zone_len);
        }
        out[{c.key, c.value_id}] = score;
    }
}

} // namespace

ScoreMap per_value_scores(const std::vector<Cluster>& clusters)
{
    std::map<std::int64_t, std::vector<const Cluster*>> by_key;
    for (const auto& cluster : clusters) {
        by_key[cluster.key].push_back(&cluster);
    }
    ScoreMap scores;
    for (const auto& [key, group] : by_key) {
        score_key(group, scores);
    }
    return scores;
}

double proportion_positive(const ScoreMap& scores, DurationUs threshold_us)
{
    if (scores.empty()) {
        return 0.0;
    }
    std::size_t over = 0;
    for (const auto& [vk, gamma] : scores) {
        if (gamma > threshold_us) {
            ++over;
        }
    }
    return static_cast<double>(over) / static_cast<double>(scores.size());
}

ScoreReport score_trace(const Trace& trace, DurationUs threshold_us)
{
    const auto clusters = build_clusters(trace);
    ScoreReport report;
    report.threshold_us = threshold_us;
    report.scores = per_value_scores(clusters);
    report.clusters = clusters.size();

    std::size_t stale_reads = 0;
    for (const auto& cluster : clusters) {
        report.reads += cluster.read_count;
        const auto gamma = report.scores.at({cluster.key, cluster.value_id});
        if (gamma > 0) {
            ++report.positive_raw;
        }
        if (gamma > threshold_us) {
            ++report.positive_over_threshold;
            stale_reads += cluster.read_count;
        }
        report.max_score_us = std::max(report.max_score_us, gamma);
    }
    report.proportion_positive =
        proportion_positive(report.scores, threshold_us);
    report.proportion_positive_reads =
        report.reads == 0 ? 0.0
                          : static_cast<double>(stale_reads) /
                                static_cast<double>(report.reads);
    return report;
}

namespace {

// Oracle internals work in doubled time coordinates so the per-side
// half-stretch delta/2 stays integral: an interval [s, f] stretched by
// delta/2 becomes [2s - delta, 2f + delta].
struct OracleValue {
    bool has_write = false;
    std::size_t write_op_index = 0;
    std::int64_t write_s2 = 0;
    std::int64_t write_f2 = 0;
    std::int64_t min_f2 = 0; // min doubled response over members
    std::int64_t max_s2 = 0; // max doubled invoke over members
    std::vector<std::size_t> read_ops;
};

struct OraclePlacement {
    std::vector<std::size_t> value_order;
    std::vector<std::int64_t> boundaries; // write effect points, doubled
};

constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min() / 4;
constexpr std::int64_t kPosInf = std::numeric_limits<std::int64_t>::max() / 4;

// Feasibility for a fixed per-side stretch `delta` (doubled coords): choose
// a write order and boundaries t_j such that t_j lies in the stretched write
// interval, no member of value j finishes (stretched) before t_j, and no
// member of value j invokes (stretched) after t_{j+1}. Orders are searched
// with a (visited-set, last-value) DP over the minimal feasible boundary;
// smaller boundaries only relax later constraints, so the DP is exact.
bool oracle_feasible(const std::vector<OracleValue>& values,
                     std::int64_t delta, OraclePlacement* placement)
{
    const std::size_t m = values.size();
    const std::size_t masks = std::size_t{1} << m;

    std::vector<std::vector<std::int64_t>> best(
        masks, std::vector<std::int64_t>(m, kPosInf));
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> parent(
        masks, std::vector<std::pair<std::size_t, std::size_t>>(m, {0, 0}));

    const auto fits = [&](std::size_t v, std::int64_t t) {
        return t <= values[v].min_f2 + delta;
    };

    for (std::size_t v = 0; v < m; ++v) {
        const std::int64_t t = values[v].write_s2 - delta;
        if (fits(v, t)) {
            best[std::size_t{1} << v][v] = t;
        }
    }
    for (std::size_t mask = 1; mask < masks; ++mask) {
        for (std::size_t last = 0; last < m; ++last) {
            if (!(mask & (std::size_t{1} << last)) ||
                best[mask][last] == kPosInf) {
                continue;
            }
            const std::int64_t t = best[mask][last];
            for (std::size_t next = 0; next < m; ++next) {
                if (mask & (std::size_t{1} << next)) {
                    continue;
                }
                const std::int64_t tn =
                    std::max({t, values[next].write_s2 - delta,
                              values[last].max_s2 - delta});
                const std::size_t nmask = mask | (std::size_t{1} << next);
                if (fits(next, tn) && tn < best[nmask][next]) {
                    best[nmask][next] = tn;
                    parent[nmask][next] = {mask, last};
                }
            }
        }
    }

    const std::size_t full = masks - 1;
    std::size_t end = m;
    for (std::size_t last = 0; last < m; ++last) {
        if (best[full][last] != kPosInf &&
            (end == m || best[full][last] < best[full][end])) {
            end = last;
        }
    }
    if (end == m) {
        return false;
    }
    if (placement) {
        placement->value_order.assign(m, 0);
        placement->boundaries.assign(m, 0);
        std::size_t mask = full;
        std::size_t last = end;
        for (std::size_t pos = m; pos-- > 0;) {
            placement->value_order[pos] = last;
            placement->boundaries[pos] = best[mask][last];
            const auto [pmask, plast] = parent[mask][last];
            mask = pmask;
            last = plast;
        }
    }
    return true;
}

// Re-checks an accepted placement against the raw definition: materialize
// the effect-point sequence and verify every point sits inside its stretched
// interval, points never decrease, and each read is most recently preceded
// by the write of its value.
bool oracle_verify(std::span<const OperationRecord> ops,
                   const std::vector<OracleValue>& values,
                   const OraclePlacement& placement, std::int64_t delta)
{
    struct Point {
        std::int64_t at;
        std::size_t op_index;
    };
    std::vector<Point> sequence;
    sequence.reserve(ops.size());

    for (std::size_t pos = 0; pos < placement.value_order.size(); ++pos) {
        const std::size_t v = placement.value_order[pos];
        const std::int64_t t = placement.boundaries[pos];
        const std::int64_t t_next = pos + 1 < placement.boundaries.size()
                                        ? placement.boundaries[pos + 1]
                                        : kPosInf;

        sequence.push_back({t, values[v].write_op_index});
        std::vector<Point> reads;
        reads.reserve(values[v].read_ops.size());
        for (const std::size_t r : values[v].read_ops) {
            const std::int64_t point =
                std::max(t, 2 * ops[r].invoke.micros - delta);
            if (point > t_next) {
                return false;
            }
            reads.push_back({point, r});
        }
        std::sort(reads.begin(), reads.end(),
                  [](const Point& a, const Point& b) { return a.at < b.at; });
        sequence.insert(sequence.end(), reads.begin(), reads.end());
    }

    std::int64_t prev = kNegInf;
    for (const auto& p : sequence) {
        if (p.at < prev) {
            return false;
        }
        prev = p.at;
        const auto& op = ops[p.op_index];
        if (p.at < 2 * op.invoke.micros - delta ||
            p.at > 2 * op.response.micros + delta) {
            return false;
        }
    }
    std::int64_t current_value = std::numeric_limits<std::int64_t>::min();
    for (const auto& p : sequence) {
        const auto& op = ops[p.op_index];
        if (op.kind == OpKind::Write) {
            current_value = op.value_id;
        } else if (op.value_id != current_value) {
            return false;
        }
    }
    return true;
}

} // namespace

DurationUs min_stretch_oracle(std::span<const OperationRecord> ops)
{
    if (ops.size() > kOracleMaxOps) {
        throw OracleSizeError("min_stretch_oracle: history exceeds " +
                              std::to_string(kOracleMaxOps) + " operations");
    }
    if (ops.empty()) {
        return 0;
    }
    const std::int64_t key = ops.front().key;
    std::map<std::int64_t, std::size_t> value_index;
    std::vector<OracleValue> values;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto& op = ops[i];
        if (op.key != key) {
            throw std::invalid_argument(
                "min_stretch_oracle: operations span multiple keys");
        }
        if (op.response < op.invoke) {
            throw std::invalid_argument(
                "min_stretch_oracle: response precedes invoke");
        }
        auto [it, inserted] =
            value_index.try_emplace(op.value_id, values.size());
        if (inserted) {
            values.emplace_back();
        }
        auto& v = values[it->second];
        if (op.kind == OpKind::Write) {
            if (v.has_write) {
                throw std::invalid_argument(
                    "min_stretch_oracle: duplicate write value");
            }
            v.has_write = true;
            v.write_op_index = i;
            v.write_s2 = 2 * op.invoke.micros;
            v.write_f2 = 2 * op.response.micros;
        } else {
            v.read_ops.push_back(i);
        }
    }
    for (const auto& v : values) {
        if (!v.has_write) {
            throw std::invalid_argument(
                "min_stretch_oracle: read of a value never written");
        }
    }
    for (auto& v : values) {
        v.min_f2 = v.write_f2;
        v.max_s2 = v.write_s2;
        for (const std::size_t r : v.read_ops) {
            v.min_f2 = std::min(v.min_f2, 2 * ops[r].response.micros);
            v.max_s2 = std::max(v.max_s2, 2 * ops[r].invoke.micros);
        }
    }

    // Candidate stretches: 0 plus every positive invoke-response gap. Any
    // binding constraint equates a stretched invoke with a stretched
    // response, so the minimum lies in this set.
    std::set<std::int64_t> candidates{0};
    for (const auto& a : ops) {
        for (const auto& b : ops) {
            const std::int64_t gap = a.invoke.micros - b.response.micros;
            if (gap > 0) {
                candidates.insert(gap);
            }
        }
    }

    for (const std::int64_t delta : candidates) {
        OraclePlacement placement;
        if (oracle_feasible(values, delta, &placement) &&
            oracle_verify(ops, values, placement, delta)) {
            return delta;
        }
    }
    throw std::logic_error("min_stretch_oracle: no feasible stretch found");
}

Trace insert_synthetic_initial_writes(const Trace& trace)
{
    std::set<ValueKey> written;
    std::set<ValueKey> read_values;
    std::int64_t max_op_id = std::numeric_limits<std::int64_t>::min();
    SimTime min_invoke = SimTime::max();
    for (const auto& op : trace.ops) {
        max_op_id = std::max(max_op_id, op.op_id);
        min_invoke = std::min(min_invoke, op.invoke);
        if (op.kind == OpKind::Write) {
            written.insert({op.key, op.value_id});
        } else {
            read_values.insert({op.key, op.value_id});
        }
    }

    Trace out = trace;
    if (trace.ops.empty()) {
        return out;
    }
    const SimTime t0 = min_invoke - 1;
    std::int64_t next_id = max_op_id + 1;
    for (const auto& vk : read_values) {
        if (written.count(vk) != 0) {
            continue;
        }
        OperationRecord synthetic;
        synthetic.op_id = next_id++;
        synthetic.client_id = -1;
        synthetic.key = vk.first;
        synthetic.kind = OpKind::Write;
        synthetic.value_id = vk.second;
        synthetic.invoke = t0;
        synthetic.response = t0;
        synthetic.level_used = ConsistencyLevel::All;
        out.ops.push_back(synthetic);
    }
    return out;
}

} // namespace quorumsim
