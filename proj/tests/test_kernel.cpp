#include "quorumsim/kernel.hpp"
#include "quorumsim/rng.hpp"

#include <doctest.h>

#include <vector>

using namespace quorumsim;

TEST_CASE("events dispatch in time order regardless of insertion order")
{
    SimKernel kernel;
    std::vector<int> order;
    kernel.schedule_at(SimTime{5}, [&] { order.push_back(5); });
    kernel.schedule_at(SimTime{3}, [&] { order.push_back(3); });
    kernel.run_until(SimTime{10});
    CHECK(order == std::vector<int>{3, 5});
    CHECK(kernel.now() == SimTime{10});
}

TEST_CASE("same-time events dispatch in insertion order")
{
    SimKernel kernel;
    std::vector<int> order;
    kernel.schedule_at(SimTime{7}, [&] { order.push_back(1); });
    kernel.schedule_at(SimTime{7}, [&] { order.push_back(2); });
    kernel.schedule_at(SimTime{7}, [&] { order.push_back(3); });
    kernel.run_until_idle();
    CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("an event may fire at the current time")
{
    SimKernel kernel;
    bool fired = false;
    kernel.schedule_after(0, [&] { fired = true; });
    CHECK(kernel.step());
    CHECK(fired);
    CHECK(kernel.now() == SimTime{0});
}

TEST_CASE("run_until advances the clock over an empty queue")
{
    SimKernel kernel;
    kernel.run_until(SimTime{10});
    CHECK(kernel.now() == SimTime{10});
    // The clock never moves backwards.
    kernel.run_until(SimTime{4});
    CHECK(kernel.now() == SimTime{10});
}

TEST_CASE("run_until stops at the horizon")
{
    SimKernel kernel;
    std::vector<int> order;
    for (const int t : {2, 4, 6}) {
        kernel.schedule_at(SimTime{t}, [&order, t] { order.push_back(t); });
    }
    kernel.run_until(SimTime{5});
    CHECK(order == std::vector<int>{2, 4});
    CHECK(kernel.now() == SimTime{5});
    kernel.run_until_idle();
    CHECK(order == std::vector<int>{2, 4, 6});
}

TEST_CASE("events scheduled by events inside the horizon also dispatch")
{
    SimKernel kernel;
    std::vector<int> order;
    kernel.schedule_at(SimTime{1}, [&] {
        order.push_back(1);
        kernel.schedule_at(SimTime{2}, [&] { order.push_back(2); });
    });
    kernel.run_until(SimTime{3});
    CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("scheduling in the past is a logic error")
{
    SimKernel kernel;
    kernel.run_until(SimTime{100});
    CHECK_THROWS_AS(kernel.schedule_at(SimTime{99}, [] {}),
                    std::logic_error);
}

TEST_CASE("clock is monotone across a run")
{
    SimKernel kernel;
    RngStream rng(5, "kernel");
    for (int i = 0; i < 200; ++i) {
        kernel.schedule_at(SimTime{static_cast<std::int64_t>(
                               rng.next_below(1000))},
                           [] {});
    }
    SimTime last = kernel.now();
    while (kernel.step()) {
        CHECK(kernel.now() >= last);
        last = kernel.now();
    }
}
