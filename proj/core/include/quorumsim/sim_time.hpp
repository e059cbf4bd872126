#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace quorumsim {

// Durations are signed integer microseconds. Integer time keeps event
// ordering exact; the simulated phenomena span ~50us hops to ~25ms latencies,
// so microsecond resolution is sufficient.
using DurationUs = std::int64_t;

// A point in virtual time, microseconds since simulation start. Signed so
// synthetic pre-trace writes can sit before t=0.
struct SimTime {
    std::int64_t micros = 0;

    auto operator<=>(const SimTime&) const = default;

    static constexpr SimTime min() noexcept
    {
        return SimTime{std::numeric_limits<std::int64_t>::min()};
    }
    static constexpr SimTime max() noexcept
    {
        return SimTime{std::numeric_limits<std::int64_t>::max()};
    }
};

constexpr SimTime operator+(SimTime t, DurationUs d) noexcept
{
    return SimTime{t.micros + d};
}

constexpr SimTime operator-(SimTime t, DurationUs d) noexcept
{
    return SimTime{t.micros - d};
}

// Difference between two time points, in microseconds.
constexpr DurationUs operator-(SimTime a, SimTime b) noexcept
{
    return a.micros - b.micros;
}

} // namespace quorumsim
