#pragma once

#include "quorumsim/sim_time.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quorumsim {

// Client-side consistency level: how many replica acks a coordinator waits
// for. Ack counts are 1, floor(rf/2)+1 and rf respectively.
enum class ConsistencyLevel { One, Quorum, All };

std::string_view to_string(ConsistencyLevel level) noexcept;
ConsistencyLevel parse_level(std::string_view text); // accepts "ONE"/"one"/...

enum class OpKind { Read, Write };

// One client-observed storage operation; the unit the analyzer consumes.
// `invoke` includes any policy pre-delay and `response` any post-delay, so
// the recorded interval is exactly what the client experienced.
struct OperationRecord {
    std::int64_t op_id = 0;
    std::int64_t client_id = 0;
    std::int64_t key = 0;
    OpKind kind = OpKind::Read;
    std::int64_t value_id = 0;
    SimTime invoke{};
    SimTime response{};
    ConsistencyLevel level_used = ConsistencyLevel::One;
    DurationUs pre_delay_us = 0;
    DurationUs post_delay_us = 0;

    bool operator==(const OperationRecord&) const = default;
};

struct TraceMeta {
    std::string config_digest;
    std::uint64_t seed = 0;
    DurationUs duration_us = 0;

    bool operator==(const TraceMeta&) const = default;
};

struct Trace {
    std::vector<OperationRecord> ops;
    TraceMeta meta;

    bool operator==(const Trace&) const = default;
};

// The synthetic value returned by reads that complete before any write of
// their key.
inline constexpr std::int64_t kInitialValueId = 0;

struct TraceViolation {
    std::int64_t op_id = 0;
    std::string rule;

    bool operator==(const TraceViolation&) const = default;
};

// Checks the Trace invariants: per-op time order, unique op_ids, unique
// (key, value_id) per write, and every read value dictated by some write on
// the same key or by the initial value. Violations are data, not errors.
std::vector<TraceViolation> validate_trace(const Trace& trace);

class TraceParseError : public std::runtime_error {
public:
    TraceParseError(std::size_t line, const std::string& what)
        : std::runtime_error("trace parse error at line " +
                             std::to_string(line) + ": " + what),
          line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// CSV persistence. Header:
//   op_id,client_id,key,kind,value_id,invoke_us,response_us,level,pre_delay_us,post_delay_us
// kind is R|W, level is ONE|QUORUM|ALL; UTF-8, LF line endings. Metadata is
// carried in `# key=value` comment lines before the header so that
// load(save(t)) == t holds bit-exactly.
void save_trace(const Trace& trace, std::ostream& out);
void save_trace(const Trace& trace, const std::filesystem::path& dest);
Trace load_trace(std::istream& in);
Trace load_trace(const std::filesystem::path& source);

} // namespace quorumsim
