#pragma once

#include "quorumsim/sim_time.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace quorumsim {

// Single-threaded discrete-event scheduler: the virtual clock every
// simulated component shares. Events fire in (fire_at, insertion seq) order,
// so races at identical virtual times resolve deterministically (FIFO). The
// kernel owns no randomness; stochastic choices live in named RngStreams.
class SimKernel {
public:
    using Action = std::function<void()>;

    SimTime now() const noexcept { return now_; }

    // Schedules `action` to run exactly once at virtual time `at`.
    // Scheduling in the past indicates a logic bug and throws.
    void schedule_at(SimTime at, Action action)
    {
        if (at < now_) {
            throw std::logic_error("schedule_at: fire time precedes now()");
        }
        heap_.push_back(Event{at, next_seq_++, std::move(action)});
        std::push_heap(heap_.begin(), heap_.end(), EarliestOnTop{});
    }

    void schedule_after(DurationUs delay, Action action)
    {
        schedule_at(now_ + delay, std::move(action));
    }

    // Dispatches the next event, if any. Returns false on an empty queue.
    bool step()
    {
        if (heap_.empty()) {
            return false;
        }
        std::pop_heap(heap_.begin(), heap_.end(), EarliestOnTop{});
        Event ev = std::move(heap_.back());
        heap_.pop_back();
        now_ = ev.fire_at;
        ev.action(); // may re-enter schedule_at
        return true;
    }

    // Dispatches every event with fire_at <= t_end, including events that
    // those events schedule inside the horizon. Afterwards now() is t_end
    // (the clock never moves backwards).
    void run_until(SimTime t_end)
    {
        while (!heap_.empty() && heap_.front().fire_at <= t_end) {
            step();
        }
        if (now_ < t_end) {
            now_ = t_end;
        }
    }

    // Runs until the queue drains.
    void run_until_idle()
    {
        while (step()) {
        }
    }

    std::size_t pending() const noexcept { return heap_.size(); }

private:
    struct Event {
        SimTime fire_at;
        std::uint64_t seq;
        Action action;
    };

    // std::push_heap keeps the comparator's "greatest" element at front;
    // invert so the earliest (fire_at, seq) surfaces.
    struct EarliestOnTop {
        bool operator()(const Event& a, const Event& b) const noexcept
        {
            if (a.fire_at != b.fire_at) {
                return b.fire_at < a.fire_at;
            }
            return b.seq < a.seq;
        }
    };

    SimTime now_{};
    std::uint64_t next_seq_ = 0;
    std::vector<Event> heap_;
};

} // namespace quorumsim
