#include "quorumsim/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace quorumsim {

namespace {

using nlohmann::json;

DurationUs percentile_sorted(const std::vector<DurationUs>& sorted, double q)
{
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(
        std::ceil(q / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

KindStats stats_from(std::vector<DurationUs>& samples)
{
    KindStats stats;
    stats.count = samples.size();
    if (samples.empty()) {
        return stats;
    }
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (const auto s : samples) {
        sum += static_cast<double>(s);
    }
    stats.mean_us = sum / static_cast<double>(samples.size());
    stats.p50_us = percentile_sorted(samples, 50.0);
    stats.p95_us = percentile_sorted(samples, 95.0);
    stats.p99_us = percentile_sorted(samples, 99.0);
    stats.max_us = samples.back();
    return stats;
}

json histogram_json(const ScoreMap& scores)
{
    // Fixed buckets in microseconds; the last bucket is unbounded.
    static constexpr DurationUs kBounds[] = {0,    500,   1000, 2000,
                                             5000, 10000, 20000};
    std::vector<std::size_t> counts(std::size(kBounds) + 1, 0);
    for (const auto& [vk, gamma] : scores) {
        std::size_t bucket = std::size(kBounds);
        for (std::size_t i = 0; i < std::size(kBounds); ++i) {
            if (gamma <= kBounds[i]) {
                bucket = i;
                break;
            }
        }
        ++counts[bucket];
    }
    json buckets = json::array();
    for (std::size_t i = 0; i < std::size(kBounds); ++i) {
        buckets.push_back({{"le_us", kBounds[i]}, {"count", counts[i]}});
    }
    buckets.push_back({{"le_us", nullptr}, {"count", counts.back()}});
    return buckets;
}

json kind_stats_json(const KindStats& stats)
{
    return json{{"count", stats.count},   {"mean_us", stats.mean_us},
                {"p50_us", stats.p50_us}, {"p95_us", stats.p95_us},
                {"p99_us", stats.p99_us}, {"max_us", stats.max_us}};
}

json score_report_json(const ScoreReport& report)
{
    return json{
        {"threshold_us", report.threshold_us},
        {"clusters", report.clusters},
        {"reads", report.reads},
        {"positive_raw", report.positive_raw},
        {"positive_over_threshold", report.positive_over_threshold},
        {"max_score_us", report.max_score_us},
        {"proportion_positive", report.proportion_positive},
        {"proportion_positive_reads", report.proportion_positive_reads},
        {"scores_histogram", histogram_json(report.scores)},
    };
}

} // namespace

DurationUs percentile(std::span<const DurationUs> samples, double q)
{
    if (samples.empty()) {
        throw std::invalid_argument("percentile: empty sample set");
    }
    if (!(q > 0.0 && q <= 100.0)) {
        throw std::invalid_argument("percentile: q must be in (0, 100]");
    }
    std::vector<DurationUs> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return percentile_sorted(sorted, q);
}

LatencyStats summarize(std::span<const OperationRecord> ops)
{
    std::vector<DurationUs> reads;
    std::vector<DurationUs> writes;
    for (const auto& op : ops) {
        auto& bucket = op.kind == OpKind::Read ? reads : writes;
        bucket.push_back(op.response - op.invoke);
    }
    LatencyStats stats;
    stats.read = stats_from(reads);
    stats.write = stats_from(writes);
    return stats;
}

double per_host_p95_avg(std::span<const OperationRecord> ops, OpKind kind,
                        int hosts)
{
    if (hosts < 1) {
        throw std::invalid_argument("per_host_p95_avg: hosts must be >= 1");
    }
    std::vector<std::vector<DurationUs>> per_host(
        static_cast<std::size_t>(hosts));
    for (const auto& op : ops) {
        if (op.kind != kind || op.client_id < 0) {
            continue;
        }
        per_host[static_cast<std::size_t>(op.client_id % hosts)].push_back(
            op.response - op.invoke);
    }
    double sum = 0.0;
    int populated = 0;
    for (auto& samples : per_host) {
        if (samples.empty()) {
            continue;
        }
        std::sort(samples.begin(), samples.end());
        sum += static_cast<double>(percentile_sorted(samples, 95.0));
        ++populated;
    }
    return populated == 0 ? 0.0 : sum / populated;
}

SlaVerdict sla_check(const LatencyStats& stats, const ScoreReport& score,
                     const SlaSpec& sla)
{
    SlaVerdict verdict;
    verdict.latency_pass =
        static_cast<double>(stats.read.p95_us) <= sla.l_ms * 1000.0;
    verdict.staleness_pass = score.proportion_positive_reads <= sla.x;
    return verdict;
}

std::string to_json(const RunReport& report)
{
    json j{
        {"config_digest", report.config_digest},
        {"seed", report.seed},
        {"latency",
         {{"read", kind_stats_json(report.latency.read)},
          {"write", kind_stats_json(report.latency.write)}}},
        {"throughput_ops_per_s", report.throughput_ops_per_s},
        {"throughput_shortfall", report.throughput_shortfall},
        {"gamma", score_report_json(report.gamma)},
        {"sla",
         {{"l_ms", report.sla.l_ms},
          {"x", report.sla.x},
          {"latency_pass", report.verdict.latency_pass},
          {"staleness_pass", report.verdict.staleness_pass}}},
    };
    if (report.per_host_mode) {
        j["per_host"] = {
            {"read_p95_avg_us", report.read_p95_per_host_avg_us},
            {"write_p95_avg_us", report.write_p95_per_host_avg_us}};
    }
    return j.dump(2) + "\n";
}

std::string to_json(const ScoreReport& report)
{
    return score_report_json(report).dump(2) + "\n";
}

} // namespace quorumsim
