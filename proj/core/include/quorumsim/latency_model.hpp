#pragma once

#include "quorumsim/rng.hpp"
#include "quorumsim/sim_time.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace quorumsim {

// Message-delay / service-time distribution. All samples are strictly
// positive microsecond durations. The lognormal variant is parameterized by
// its median (not mean) so config values read directly as "typical" delays.
class LatencyModel {
public:
    enum class Kind { Constant, LogNormal, Empirical };

    static LatencyModel constant(DurationUs delay_us);
    static LatencyModel lognormal(double median_us, double sigma);
    static LatencyModel empirical(std::vector<DurationUs> samples);

    // Grammar: "const:50" | "lognormal:175:0.15" | "empirical:100,200,350".
    // Values are microseconds.
    static LatencyModel parse(std::string_view text);
    std::string to_string() const;

    DurationUs sample(RngStream& rng) const;

    Kind kind() const noexcept { return kind_; }

    bool operator==(const LatencyModel&) const = default;

private:
    LatencyModel() = default;

    Kind kind_ = Kind::Constant;
    DurationUs constant_us_ = 1;
    double median_us_ = 1.0;
    double sigma_ = 0.0;
    std::vector<DurationUs> samples_;
};

// Per-replica request processing times. Reads are modeled slightly slower
// than writes, mirroring the write-optimized store being simulated.
struct ServiceModel {
    LatencyModel read_service = LatencyModel::parse("lognormal:420:0.7");
    LatencyModel write_service = LatencyModel::parse(
        "empirical:63,78,88,96,103,109,115,120,125,130,135,139,144,148,153,157,162,167,171,176,180,185,190,195,200,205,211,216,222,228,234,240,247,254,261,269,278,287,297,308,320,334,349,367,389,416,453,510,638,6000");
};

// Link models: client<->coordinator is a local hop; coordinator<->replica
// crosses the network unless the replica is co-located with the coordinator.
struct NetworkModel {
    LatencyModel one_way = LatencyModel::parse("lognormal:175:0.15");
    LatencyModel local_hop = LatencyModel::parse("const:50");
};

} // namespace quorumsim
