#pragma once

#include "quorumsim/rng.hpp"
#include "quorumsim/trace.hpp"

#include <string>

namespace quorumsim {

// A consistency-latency tuning policy. Three techniques:
//  - Fixed: one configured level per operation kind.
//  - Cpq: continuous partial quorums; the high level with probability p,
//    the low level otherwise, drawn independently per operation. p makes the
//    discrete level choice a continuous knob.
//  - Ad: artificial delays at a fixed (weak) level; reads get a pre-delay,
//    writes a post-delay. The delay sits inside the recorded operation
//    interval, which is what buys measured consistency at a latency cost.
struct PolicySpec {
    enum class Kind { Fixed, Cpq, Ad };

    Kind kind = Kind::Fixed;

    // Fixed / Ad.
    ConsistencyLevel read_level = ConsistencyLevel::One;
    ConsistencyLevel write_level = ConsistencyLevel::One;

    // Cpq. low != high required.
    double p = 0.0;
    ConsistencyLevel low = ConsistencyLevel::One;
    ConsistencyLevel high = ConsistencyLevel::Quorum;

    // Ad, microseconds.
    DurationUs read_pre_delay_us = 0;
    DurationUs write_post_delay_us = 0;

    void validate() const;
    std::string describe() const;
};

struct Decision {
    ConsistencyLevel level = ConsistencyLevel::One;
    DurationUs pre_delay_us = 0;
    DurationUs post_delay_us = 0;

    bool operator==(const Decision&) const = default;
};

// Per-operation decision. CPQ draws one uniform per call; the same rule is
// applied to reads and writes. Fixed and Ad consume no randomness.
Decision select(const PolicySpec& policy, OpKind kind, RngStream& rng);

// Delay accounting: the recorded invoke is the instant the client began the
// pre-delay, and the recorded response is the store response plus the
// post-delay. Both delays therefore land inside the recorded interval.
struct RecordedInterval {
    SimTime invoke{};
    SimTime response{};
};
RecordedInterval apply_delay_accounting(const Decision& decision,
                                        SimTime true_dispatch,
                                        SimTime store_response);

} // namespace quorumsim
