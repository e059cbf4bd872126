#include "quorumsim/policy.hpp"

#include <sstream>
#include <stdexcept>

namespace quorumsim {

void PolicySpec::validate() const
{
    if (kind == Kind::Cpq) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("policy: cpq p must be in [0,1]");
        }
        if (low == high) {
            throw std::invalid_argument("policy: cpq levels must differ");
        }
    }
    if (read_pre_delay_us < 0 || write_post_delay_us < 0) {
        throw std::invalid_argument("policy: delays must be >= 0");
    }
}

std::string PolicySpec::describe() const
{
    std::ostringstream out;
    switch (kind) {
    case Kind::Fixed:
        out << "fixed " << to_string(read_level) << '-'
            << to_string(write_level);
        break;
    case Kind::Cpq:
        out << "cpq p=" << p << ' ' << to_string(low) << '/'
            << to_string(high);
        break;
    case Kind::Ad:
        out << "ad " << to_string(read_level) << '-' << to_string(write_level)
            << " read_pre=" << read_pre_delay_us
            << "us write_post=" << write_post_delay_us << "us";
        break;
    }
    return out.str();
}

Decision select(const PolicySpec& policy, OpKind kind, RngStream& rng)
{
    Decision decision;
    switch (policy.kind) {
    case PolicySpec::Kind::Fixed:
        decision.level = kind == OpKind::Read ? policy.read_level
                                              : policy.write_level;
        break;
    case PolicySpec::Kind::Cpq:
        // Independent draw per operation; no correlation across a client's
        // consecutive operations.
        decision.level =
            rng.next_double() < policy.p ? policy.high : policy.low;
        break;
    case PolicySpec::Kind::Ad:
        decision.level = kind == OpKind::Read ? policy.read_level
                                              : policy.write_level;
        if (kind == OpKind::Read) {
            decision.pre_delay_us = policy.read_pre_delay_us;
        } else {
            decision.post_delay_us = policy.write_post_delay_us;
        }
        break;
    }
    return decision;
}

RecordedInterval apply_delay_accounting(const Decision& decision,
                                        SimTime true_dispatch,
                                        SimTime store_response)
{
    return RecordedInterval{true_dispatch,
                            store_response + decision.post_delay_us};
}

} // namespace quorumsim
