#include "quorumsim/trace.hpp"

#include "quorumsim/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace quorumsim {

namespace {

constexpr std::string_view kHeader =
    "op_id,client_id,key,kind,value_id,invoke_us,response_us,level,"
    "pre_delay_us,post_delay_us";

std::int64_t parse_int(std::string_view field, std::size_t line,
                       std::string_view what)
{
    std::int64_t value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw TraceParseError(line, std::string("bad ") + std::string(what) +
                                        " '" + std::string(field) + "'");
    }
    return value;
}

std::uint64_t parse_uint(std::string_view field, std::size_t line,
                         std::string_view what)
{
    std::uint64_t value = 0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw TraceParseError(line, std::string("bad ") + std::string(what) +
                                        " '" + std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split_csv(std::string_view row)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = row.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(row.substr(start));
            break;
        }
        fields.push_back(row.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

} // namespace

std::string_view to_string(ConsistencyLevel level) noexcept
{
    switch (level) {
    case ConsistencyLevel::One:
        return "ONE";
    case ConsistencyLevel::Quorum:
        return "QUORUM";
    case ConsistencyLevel::All:
        return "ALL";
    }
    return "ONE";
}

ConsistencyLevel parse_level(std::string_view text)
{
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (upper == "ONE") {
        return ConsistencyLevel::One;
    }
    if (upper == "QUORUM" || upper == "QUO") {
        return ConsistencyLevel::Quorum;
    }
    if (upper == "ALL") {
        return ConsistencyLevel::All;
    }
    throw std::invalid_argument("unknown consistency level '" +
                                std::string(text) + "'");
}

std::vector<TraceViolation> validate_trace(const Trace& trace)
{
    std::vector<TraceViolation> violations;

    std::unordered_set<std::int64_t> seen_ids;
    seen_ids.reserve(trace.ops.size());
    // (key, value_id) pairs written, and read, per key.
    std::map<std::pair<std::int64_t, std::int64_t>, int> writes;
    for (const auto& op : trace.ops) {
        if (!seen_ids.insert(op.op_id).second) {
            violations.push_back({op.op_id, "duplicate op_id"});
        }
        if (op.response < op.invoke) {
            violations.push_back({op.op_id, "time order"});
        }
        if (op.kind == OpKind::Write) {
            if (++writes[{op.key, op.value_id}] > 1) {
                violations.push_back({op.op_id, "duplicate write value"});
            }
        }
    }
    for (const auto& op : trace.ops) {
        if (op.kind == OpKind::Read && op.value_id != kInitialValueId &&
            writes.find({op.key, op.value_id}) == writes.end()) {
            violations.push_back({op.op_id, "dangling value"});
        }
    }
    return violations;
}

void save_trace(const Trace& trace, std::ostream& out)
{
    out << "# config_digest=" << trace.meta.config_digest << "\n";
    out << "# seed=" << trace.meta.seed << "\n";
    out << "# duration_us=" << trace.meta.duration_us << "\n";
    out << kHeader << "\n";
    for (const auto& op : trace.ops) {
        out << op.op_id << ',' << op.client_id << ',' << op.key << ','
            << (op.kind == OpKind::Read ? 'R' : 'W') << ',' << op.value_id
            << ',' << op.invoke.micros << ',' << op.response.micros << ','
            << to_string(op.level_used) << ',' << op.pre_delay_us << ','
            << op.post_delay_us << "\n";
    }
}

void save_trace(const Trace& trace, const std::filesystem::path& dest)
{
    std::ofstream out(dest, std::ios::binary);
    if (!out) {
        throw IoError("cannot open trace file for writing: " + dest.string());
    }
    save_trace(trace, out);
    if (!out) {
        throw IoError("failed writing trace file: " + dest.string());
    }
}

Trace load_trace(std::istream& in)
{
    Trace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            std::string_view body(line);
            body.remove_prefix(1);
            while (!body.empty() && body.front() == ' ') {
                body.remove_prefix(1);
            }
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            const auto key = body.substr(0, eq);
            const auto value = body.substr(eq + 1);
            if (key == "config_digest") {
                trace.meta.config_digest = std::string(value);
            } else if (key == "seed") {
                trace.meta.seed = parse_uint(value, line_no, "seed");
            } else if (key == "duration_us") {
                trace.meta.duration_us = parse_int(value, line_no, "duration");
            }
            continue;
        }
        if (!header_seen) {
            if (line != kHeader) {
                throw TraceParseError(line_no, "unexpected header");
            }
            header_seen = true;
            continue;
        }

        const auto fields = split_csv(line);
        if (fields.size() != 10) {
            throw TraceParseError(line_no, "expected 10 fields, got " +
                                               std::to_string(fields.size()));
        }
        OperationRecord op;
        op.op_id = parse_int(fields[0], line_no, "op_id");
        op.client_id = parse_int(fields[1], line_no, "client_id");
        op.key = parse_int(fields[2], line_no, "key");
        if (fields[3] == "R") {
            op.kind = OpKind::Read;
        } else if (fields[3] == "W") {
            op.kind = OpKind::Write;
        } else {
            throw TraceParseError(line_no, "bad kind '" +
                                               std::string(fields[3]) + "'");
        }
        op.value_id = parse_int(fields[4], line_no, "value_id");
        op.invoke = SimTime{parse_int(fields[5], line_no, "invoke_us")};
        op.response = SimTime{parse_int(fields[6], line_no, "response_us")};
        try {
            op.level_used = parse_level(fields[7]);
        } catch (const std::invalid_argument& e) {
            throw TraceParseError(line_no, e.what());
        }
        op.pre_delay_us = parse_int(fields[8], line_no, "pre_delay_us");
        op.post_delay_us = parse_int(fields[9], line_no, "post_delay_us");
        trace.ops.push_back(op);
    }
    if (!header_seen) {
        throw TraceParseError(line_no, "missing header");
    }
    return trace;
}

Trace load_trace(const std::filesystem::path& source)
{
    std::ifstream in(source, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trace file: " + source.string());
    }
    return load_trace(in);
}

} // namespace quorumsim
