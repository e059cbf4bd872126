#include "quorumsim/gamma.hpp"
#include "quorumsim/rng.hpp"

#include <doctest.h>

#include <algorithm>

using namespace quorumsim;

namespace {

OperationRecord op(std::int64_t id, std::int64_t key, OpKind kind,
                   std::int64_t value, std::int64_t invoke,
                   std::int64_t response)
{
    OperationRecord record;
    record.op_id = id;
    record.key = key;
    record.kind = kind;
    record.value_id = value;
    record.invoke = SimTime{invoke};
    record.response = SimTime{response};
    return record;
}

Trace trace_of(std::vector<OperationRecord> ops)
{
    Trace trace;
    trace.ops = std::move(ops);
    return trace;
}

// O(m^2) restatement of the per-value score used to cross-check the
// O(m log m) implementation: max over siblings of the smaller orientation
// term, plus the intra-cluster term, capped by the own zone length.
ScoreMap brute_scores(const std::vector<Cluster>& clusters)
{
    ScoreMap out;
    for (const auto& c : clusters) {
        const std::int64_t lc = c.min_response.micros;
        const std::int64_t hc = c.max_invoke.micros;
        std::int64_t score = 0;
        if (hc > lc) {
            std::int64_t best = c.has_write ? c.write_invoke.micros - lc : 0;
            for (const auto& u : clusters) {
                if (u.key != c.key || u.value_id == c.value_id) {
                    continue;
                }
                const std::int64_t lu = u.min_response.micros;
                const std::int64_t hu = u.max_invoke.micros;
                best = std::max(best, std::min(hc - lu, hu - lc));
            }
            score = std::clamp<std::int64_t>(best, 0, hc - lc);
        }
        out[{c.key, c.value_id}] = score;
    }
    return out;
}

// Random single-key histories with unique writes and every read returning a
// written value. Mixes realizable-looking histories (reads start after their
// write's invoke) with fully random ones.
std::vector<OperationRecord> random_history(RngStream& rng, int max_ops)
{
    const int n = 2 + static_cast<int>(rng.next_below(max_ops - 1));
    const int writes = 1 + static_cast<int>(rng.next_below(
                               std::min(n, 5)));
    std::vector<OperationRecord> ops;
    std::vector<std::int64_t> write_invokes;
    std::int64_t id = 0;
    for (int w = 0; w < writes; ++w) {
        const auto s = rng.next_in(0, 40);
        ops.push_back(op(id++, 1, OpKind::Write, w + 1, s,
                         s + rng.next_in(0, 10)));
        write_invokes.push_back(s);
    }
    const bool realizable = rng.next_double() < 0.6;
    for (int r = writes; r < n; ++r) {
        const auto value = 1 + static_cast<std::int64_t>(
                                   rng.next_below(writes));
        std::int64_t s = rng.next_in(0, 40);
        if (realizable) {
            // Read starts no earlier than its dictating write's invoke.
            s = std::max(s, write_invokes[value - 1]);
        }
        ops.push_back(op(id++, 1, OpKind::Read, value, s,
                         s + rng.next_in(0, 10)));
    }
    return ops;
}

DurationUs max_score(const std::vector<OperationRecord>& ops)
{
    const auto clusters = build_clusters(trace_of(ops));
    const auto scores = per_value_scores(clusters);
    DurationUs best = 0;
    for (const auto& [vk, gamma] : scores) {
        best = std::max(best, gamma);
    }
    return best;
}

} // namespace

TEST_CASE("clusters group by key and value")
{
    const auto clusters = build_clusters(trace_of({
        op(0, 1, OpKind::Write, 1, 0, 2),
        op(1, 1, OpKind::Read, 1, 3, 5),
        op(2, 1, OpKind::Read, 1, 4, 6),
    }));
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].read_count == 2);
    CHECK(clusters[0].has_write);

    const auto two = build_clusters(trace_of({
        op(0, 1, OpKind::Write, 1, 0, 2),
        op(1, 2, OpKind::Write, 2, 0, 2),
    }));
    CHECK(two.size() == 2);
}

TEST_CASE("dangling reads direct the caller to synthetic insertion")
{
    try {
        build_clusters(trace_of({op(0, 1, OpKind::Read, 9, 3, 5)}));
        FAIL("expected DanglingValueError");
    } catch (const DanglingValueError& e) {
        REQUIRE(e.dangling().size() == 1);
        CHECK(e.dangling()[0] == std::pair<std::int64_t, std::int64_t>{1, 9});
    }
}

TEST_CASE("zones follow the min-response / max-invoke rule")
{
    {
        const auto clusters = build_clusters(trace_of(
            {op(0, 1, OpKind::Write, 1, 0, 2), op(1, 1, OpKind::Read, 1, 3, 5)}));
        const auto zone = compute_zone(clusters[0]);
        CHECK(zone.low == SimTime{2});
        CHECK(zone.high == SimTime{3});
        CHECK(zone.forward);
        CHECK(zone.interval_lo == SimTime{2});
        CHECK(zone.interval_hi == SimTime{3});
    }
    {
        // Singleton write: backward, interval [3, 5].
        const auto clusters =
            build_clusters(trace_of({op(0, 1, OpKind::Write, 1, 3, 5)}));
        const auto zone = compute_zone(clusters[0]);
        CHECK(zone.low == SimTime{5});
        CHECK(zone.high == SimTime{3});
        CHECK_FALSE(zone.forward);
        CHECK(zone.interval_lo == SimTime{3});
        CHECK(zone.interval_hi == SimTime{5});
    }
    {
        // Read nested inside its write: backward.
        const auto clusters = build_clusters(trace_of(
            {op(0, 1, OpKind::Write, 1, 0, 10), op(1, 1, OpKind::Read, 1, 2, 3)}));
        const auto zone = compute_zone(clusters[0]);
        CHECK(zone.low == SimTime{3});
        CHECK(zone.high == SimTime{2});
        CHECK_FALSE(zone.forward);
    }
}

TEST_CASE("stale read of an overwritten value scores the overlap")
{
    // W0(v0)[-1,-1], W1(v1)[0,1], R(v0)[5,6]: the read of v0 disperses past
    // v1's write.
    const std::vector<OperationRecord> ops{
        op(0, 1, OpKind::Write, 10, -1, -1),
        op(1, 1, OpKind::Write, 11, 0, 1),
        op(2, 1, OpKind::Read, 10, 5, 6),
    };
    const auto scores = per_value_scores(build_clusters(trace_of(ops)));
    CHECK(scores.at({1, 10}) == 1);
    CHECK(scores.at({1, 11}) == 0); // backward cluster
    CHECK(min_stretch_oracle(ops) == 1);
}

TEST_CASE("two interleaved forward clusters score their mutual conflict")
{
    const std::vector<OperationRecord> ops{
        op(0, 1, OpKind::Write, 1, 0, 2),
        op(1, 1, OpKind::Read, 1, 5, 7),
        op(2, 1, OpKind::Write, 2, 1, 3),
        op(3, 1, OpKind::Read, 2, 6, 8),
    };
    const auto scores = per_value_scores(build_clusters(trace_of(ops)));
    CHECK(scores.at({1, 1}) == 2);
    CHECK(scores.at({1, 2}) == 2);
    CHECK(min_stretch_oracle(ops) == 2);
}

TEST_CASE("non-overlapping zones on one key score zero")
{
    const std::vector<OperationRecord> ops{
        op(0, 1, OpKind::Write, 1, 0, 2),
        op(1, 1, OpKind::Read, 1, 3, 5),
        op(2, 1, OpKind::Write, 2, 10, 12),
        op(3, 1, OpKind::Read, 2, 13, 15),
    };
    const auto scores = per_value_scores(build_clusters(trace_of(ops)));
    CHECK(scores.at({1, 1}) == 0);
    CHECK(scores.at({1, 2}) == 0);
    CHECK(min_stretch_oracle(ops) == 0);
}

TEST_CASE("a zone nested inside another still conflicts until it escapes")
{
    // v2's zone [13,14] sits inside v1's [10,16]; plain overlap length (1)
    // would underestimate the stretch, which is 3.
    const std::vector<OperationRecord> ops{
        op(0, 1, OpKind::Write, 1, 0, 10),
        op(1, 1, OpKind::Read, 1, 11, 20),
        op(2, 1, OpKind::Write, 2, 12, 13),
        op(3, 1, OpKind::Read, 2, 14, 15),
        op(4, 1, OpKind::Read, 1, 16, 17),
    };
    const auto scores = per_value_scores(build_clusters(trace_of(ops)));
    CHECK(scores.at({1, 1}) == 3);
    CHECK(scores.at({1, 2}) == 1); // capped by its own zone length
    CHECK(min_stretch_oracle(ops) == 3);
}

TEST_CASE("proportion_positive counts clusters above the threshold")
{
    ScoreMap scores;
    scores[{1, 1}] = 0;
    scores[{1, 2}] = 1500;
    scores[{1, 3}] = 3000;
    CHECK(proportion_positive(scores, 2000) == doctest::Approx(1.0 / 3));
    ScoreMap zeros;
    zeros[{1, 1}] = 0;
    zeros[{2, 1}] = 0;
    CHECK(proportion_positive(zeros, 2000) == 0.0);
    CHECK(proportion_positive({}, 2000) == 0.0);
    // Boundary: a score exactly at the threshold is noise, not an anomaly.
    ScoreMap boundary;
    boundary[{1, 1}] = 2000;
    CHECK(proportion_positive(boundary, 2000) == 0.0);
}

TEST_CASE("linearizable histories yield zero everywhere")
{
    const std::vector<OperationRecord> ops{
        op(0, 1, OpKind::Write, 1, 0, 1),
        op(1, 1, OpKind::Read, 1, 2, 3),
    };
    CHECK(max_score(ops) == 0);
    CHECK(min_stretch_oracle(ops) == 0);
}

TEST_CASE("oracle refuses oversized and malformed histories")
{
    std::vector<OperationRecord> big;
    for (int i = 0; i < 13; ++i) {
        big.push_back(op(i, 1, OpKind::Write, i + 1, i * 10, i * 10 + 1));
    }
    CHECK_THROWS_AS(min_stretch_oracle(big), OracleSizeError);

    const std::vector<OperationRecord> two_keys{
        op(0, 1, OpKind::Write, 1, 0, 1), op(1, 2, OpKind::Write, 2, 0, 1)};
    CHECK_THROWS_AS(min_stretch_oracle(two_keys), std::invalid_argument);

    const std::vector<OperationRecord> dangling{
        op(0, 1, OpKind::Read, 9, 0, 1)};
    CHECK_THROWS_AS(min_stretch_oracle(dangling), std::invalid_argument);
}

TEST_CASE("per-value scores equal the oracle on random histories")
{
    RngStream rng(20240917, "gamma.gen");
    for (int round = 0; round < 400; ++round) {
        const auto ops = random_history(rng, 8);
        const auto fast = max_score(ops);
        const auto oracle = min_stretch_oracle(ops);
        if (fast != oracle) {
            CAPTURE(round);
            for (const auto& o : ops) {
                CAPTURE(o.op_id);
            }
            REQUIRE(fast == oracle);
        }
    }
}

TEST_CASE("fast scorer matches the quadratic restatement")
{
    RngStream rng(77, "gamma.brute");
    for (int round = 0; round < 300; ++round) {
        std::vector<OperationRecord> ops;
        std::map<std::int64_t, std::vector<std::int64_t>> written;
        std::int64_t id = 0;
        // Several keys, several values each, arbitrary interval soup.
        const int n = 6 + static_cast<int>(rng.next_below(24));
        for (int i = 0; i < n; ++i) {
            const auto key = static_cast<std::int64_t>(rng.next_below(3));
            const auto s = rng.next_in(0, 60);
            const auto f = s + rng.next_in(0, 12);
            auto& values = written[key];
            if (values.empty() || rng.next_double() < 0.4) {
                const auto value = key * 1000 + id;
                ops.push_back(op(id++, key, OpKind::Write, value, s, f));
                values.push_back(value);
            } else {
                const auto value =
                    values[rng.next_below(values.size())];
                ops.push_back(op(id++, key, OpKind::Read, value, s, f));
            }
        }
        const auto clusters = build_clusters(trace_of(ops));
        CHECK(per_value_scores(clusters) == brute_scores(clusters));
    }
}

TEST_CASE("widening intervals reduces each score by exactly min(gamma, 2*delta)")
{
    RngStream rng(99, "gamma.widen");
    for (int round = 0; round < 200; ++round) {
        const auto ops = random_history(rng, 8);
        const auto base = per_value_scores(build_clusters(trace_of(ops)));
        for (const DurationUs delta : {1, 2, 5}) {
            auto widened = ops;
            for (auto& o : widened) {
                o.invoke = o.invoke - delta;
                o.response = o.response + delta;
            }
            const auto after =
                per_value_scores(build_clusters(trace_of(widened)));
            for (const auto& [vk, gamma] : base) {
                REQUIRE(after.at(vk) == gamma - std::min(gamma, 2 * delta));
            }
        }
    }
}

TEST_CASE("scores are invariant under global time translation")
{
    RngStream rng(123, "gamma.shift");
    for (int round = 0; round < 100; ++round) {
        const auto ops = random_history(rng, 8);
        auto shifted = ops;
        const DurationUs shift = rng.next_in(-100000, 100000);
        for (auto& o : shifted) {
            o.invoke = o.invoke + shift;
            o.response = o.response + shift;
        }
        CHECK(per_value_scores(build_clusters(trace_of(ops))) ==
              per_value_scores(build_clusters(trace_of(shifted))));
    }
}

TEST_CASE("synthetic initial writes adopt orphaned reads")
{
    const Trace orphan = trace_of({op(0, 1, OpKind::Read, 0, 5, 6)});
    const Trace fixed = insert_synthetic_initial_writes(orphan);
    REQUIRE(fixed.ops.size() == 2);
    const auto& synthetic = fixed.ops.back();
    CHECK(synthetic.kind == OpKind::Write);
    CHECK(synthetic.key == 1);
    CHECK(synthetic.value_id == 0);
    CHECK(synthetic.invoke == SimTime{4});
    CHECK(synthetic.response == SimTime{4});
    CHECK(validate_trace(fixed).empty());
    CHECK_NOTHROW(build_clusters(fixed));

    // Idempotent: applying twice equals applying once.
    CHECK(insert_synthetic_initial_writes(fixed) == fixed);

    // A complete trace is unchanged.
    const Trace complete = trace_of({op(0, 1, OpKind::Write, 1, 0, 1),
                                     op(1, 1, OpKind::Read, 1, 2, 3)});
    CHECK(insert_synthetic_initial_writes(complete) == complete);
}

TEST_CASE("score_trace aggregates counts and proportions")
{
    // v1's zone swallows v2's short zone: v1 scores the full conflict
    // (3490us, two stale reads), v2 only its own zone length (1000us, noise
    // under the 2ms threshold), and key 2 is a clean singleton.
    const std::vector<OperationRecord> ops{
        op(0, 1, OpKind::Write, 1, 0, 10),
        op(1, 1, OpKind::Read, 1, 5000, 5010),
        op(2, 1, OpKind::Read, 1, 6000, 6010),
        op(3, 1, OpKind::Write, 2, 2490, 2500),
        op(4, 1, OpKind::Read, 2, 3500, 3510),
        op(5, 2, OpKind::Write, 3, 0, 10),
    };
    const auto report = score_trace(trace_of(ops), 2000);
    CHECK(report.clusters == 3);
    CHECK(report.reads == 3);
    CHECK(report.scores.at({1, 1}) == 3490);
    CHECK(report.scores.at({1, 2}) == 1000);
    CHECK(report.positive_raw == 2);
    CHECK(report.positive_over_threshold == 1);
    CHECK(report.proportion_positive == doctest::Approx(1.0 / 3));
    CHECK(report.proportion_positive_reads == doctest::Approx(2.0 / 3));
    CHECK(report.max_score_us == 3490);
    CHECK(min_stretch_oracle(std::span(ops).first(5)) == 3490);
}
