#include "quorumsim/store.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace quorumsim;

namespace {

ClusterSim make_cluster(SimKernel& kernel, RngStream& net_rng,
                        RngStream& svc_rng, StoreConfig config)
{
    NetworkModel net;
    net.one_way = LatencyModel::constant(175);
    net.local_hop = LatencyModel::constant(50);
    ServiceModel svc;
    svc.read_service = LatencyModel::constant(400);
    svc.write_service = LatencyModel::constant(200);
    return ClusterSim(kernel, config, net, svc, net_rng, svc_rng);
}

} // namespace

TEST_CASE("required_acks matches the level semantics")
{
    CHECK(required_acks(ConsistencyLevel::One, 3) == 1);
    CHECK(required_acks(ConsistencyLevel::Quorum, 3) == 2);
    CHECK(required_acks(ConsistencyLevel::All, 3) == 3);
    CHECK(required_acks(ConsistencyLevel::Quorum, 1) == 1);
    CHECK(required_acks(ConsistencyLevel::Quorum, 5) == 3);
    CHECK(required_acks(ConsistencyLevel::Quorum, 6) == 4);
    CHECK_THROWS_AS(required_acks(ConsistencyLevel::One, 0),
                    std::invalid_argument);
}

TEST_CASE("replica applies keep the greater stamp")
{
    Replica replica;
    replica.apply(1, {10, {SimTime{5}, 1}});
    replica.apply(1, {11, {SimTime{3}, 2}});
    CHECK(replica.read(1).value_id == 10);
    replica.apply(1, {12, {SimTime{9}, 3}});
    CHECK(replica.read(1).value_id == 12);
}

TEST_CASE("replica write stamp ties break by writer sequence")
{
    Replica replica;
    replica.apply(1, {10, {SimTime{5}, 7}});
    replica.apply(1, {11, {SimTime{5}, 9}});
    CHECK(replica.read(1).value_id == 11);
    replica.apply(1, {12, {SimTime{5}, 8}});
    CHECK(replica.read(1).value_id == 11);
}

TEST_CASE("replica apply to an empty key stores the version")
{
    Replica replica;
    replica.apply(42, {7, {SimTime{1}, 0}});
    CHECK(replica.read(42).value_id == 7);
}

TEST_CASE("never-written keys serve the initial value with a minimal stamp")
{
    Replica replica;
    const auto v = replica.read(5);
    CHECK(v.value_id == kInitialValueId);
    CHECK(v.stamp.ts == SimTime::min());
    CHECK(v.stamp < WriteStamp{SimTime{0}, 0});
}

TEST_CASE("replicas converge under every delivery interleaving of two writes")
{
    // Two writes fanned to three replicas: six deliveries, all 6! orders.
    const Versioned w1{100, {SimTime{10}, 1}};
    const Versioned w2{200, {SimTime{10}, 2}}; // same ts, later writer_seq
    struct Delivery {
        int replica;
        const Versioned* version;
    };
    std::vector<Delivery> deliveries;
    for (int r = 0; r < 3; ++r) {
        deliveries.push_back({r, &w1});
        deliveries.push_back({r, &w2});
    }
    std::vector<int> index(deliveries.size());
    std::iota(index.begin(), index.end(), 0);
    int orders = 0;
    do {
        Replica replicas[3];
        for (const int i : index) {
            replicas[deliveries[i].replica].apply(1, *deliveries[i].version);
        }
        for (const auto& replica : replicas) {
            REQUIRE(replica.read(1) == w2);
        }
        ++orders;
    } while (std::next_permutation(index.begin(), index.end()));
    CHECK(orders == 720);
}

TEST_CASE("replica group placement is distinct and clamped to the ring")
{
    SimKernel kernel;
    RngStream net_rng(1, "net");
    RngStream svc_rng(1, "svc");

    StoreConfig small;
    small.hosts = 2;
    small.rf = 3;
    const auto cluster = make_cluster(kernel, net_rng, svc_rng, small);
    CHECK(cluster.replica_group_size() == 2);
    CHECK(cluster.replica_hosts(4) == std::vector<int>{0, 1});
    CHECK(cluster.replica_hosts(5) == std::vector<int>{1, 0});
    CHECK(cluster.acks_required(ConsistencyLevel::One) == 1);
    CHECK(cluster.acks_required(ConsistencyLevel::Quorum) == 2);
    CHECK(cluster.acks_required(ConsistencyLevel::All) == 2);

    SimKernel kernel6;
    StoreConfig six;
    six.hosts = 6;
    six.rf = 3;
    const auto big = make_cluster(kernel6, net_rng, svc_rng, six);
    CHECK(big.replica_hosts(10) == std::vector<int>{4, 5, 0});
    CHECK(big.acks_required(ConsistencyLevel::Quorum) == 2);
    CHECK(big.acks_required(ConsistencyLevel::All) == 3);
}

TEST_CASE("level one writes unblock on the fastest ack and still converge")
{
    SimKernel kernel;
    RngStream net_rng(1, "net");
    RngStream svc_rng(1, "svc");
    StoreConfig config;
    config.hosts = 3;
    config.rf = 3;
    auto cluster = make_cluster(kernel, net_rng, svc_rng, config);

    bool done = false;
    SimTime response{};
    cluster.submit_write(0, 7, 1, ConsistencyLevel::One,
                         [&](const WriteOutcome& outcome) {
                             done = true;
                             response = outcome.response;
                         });
    kernel.run_until_idle();
    CHECK(done);
    // Fastest path: local hop to coordinator, local hop to co-located
    // replica, 200us service, and hops back.
    CHECK(response == SimTime{50 + 50 + 200 + 50 + 50});
    // All replicas hold the write once deliveries drain.
    for (int h = 0; h < 3; ++h) {
        CHECK(cluster.replica(h).read(7).value_id == 1);
    }
}

TEST_CASE("level all writes wait for the slowest replica path")
{
    SimKernel kernel;
    RngStream net_rng(1, "net");
    RngStream svc_rng(1, "svc");
    StoreConfig config;
    config.hosts = 3;
    config.rf = 3;
    auto cluster = make_cluster(kernel, net_rng, svc_rng, config);

    WriteOutcome all_outcome;
    cluster.submit_write(0, 7, 1, ConsistencyLevel::All,
                         [&](const WriteOutcome& o) { all_outcome = o; });
    kernel.run_until_idle();
    WriteOutcome one_outcome;
    cluster.submit_write(0, 8, 2, ConsistencyLevel::One,
                         [&](const WriteOutcome& o) { one_outcome = o; });
    kernel.run_until_idle();
    // Slowest path crosses the network twice; the fastest stays local.
    CHECK(all_outcome.response - all_outcome.dispatch ==
          50 + 175 + 200 + 175 + 50);
    CHECK(one_outcome.response - one_outcome.dispatch ==
          50 + 50 + 200 + 50 + 50);
}

TEST_CASE("reads resolve to the maximum stamp among responses")
{
    SimKernel kernel;
    RngStream net_rng(1, "net");
    RngStream svc_rng(1, "svc");
    StoreConfig config;
    config.hosts = 2;
    config.rf = 2;
    auto cluster = make_cluster(kernel, net_rng, svc_rng, config);

    // Stage divergent replica contents directly.
    const_cast<Replica&>(cluster.replica(0)).apply(3, {91, {SimTime{5}, 1}});
    const_cast<Replica&>(cluster.replica(1)).apply(3, {92, {SimTime{9}, 2}});

    std::int64_t got = -1;
    cluster.submit_read(0, 3, ConsistencyLevel::Quorum,
                        [&](const ReadOutcome& o) { got = o.value_id; });
    kernel.run_until_idle();
    CHECK(got == 92);
}

TEST_CASE("level one reads race and may return the stale replica value")
{
    SimKernel kernel;
    RngStream net_rng(1, "net");
    RngStream svc_rng(1, "svc");
    StoreConfig config;
    config.hosts = 2;
    config.rf = 2;
    auto cluster = make_cluster(kernel, net_rng, svc_rng, config);

    const_cast<Replica&>(cluster.replica(0)).apply(3, {91, {SimTime{5}, 1}});
    const_cast<Replica&>(cluster.replica(1)).apply(3, {92, {SimTime{9}, 2}});

    std::int64_t got = -1;
    // Constant link models make the co-located replica the fastest path, so
    // a ONE read from host 0 returns host 0's (stale) version.
    cluster.submit_read(0, 3, ConsistencyLevel::One,
                        [&](const ReadOutcome& o) { got = o.value_id; });
    kernel.run_until_idle();
    CHECK(got == 91);
}

TEST_CASE("async read repair writes the winner back to stale replicas")
{
    for (const bool repair : {false, true}) {
        SimKernel kernel;
        RngStream net_rng(1, "net");
        RngStream svc_rng(1, "svc");
        StoreConfig config;
        config.hosts = 2;
        config.rf = 2;
        config.read_repair = repair ? StoreConfig::ReadRepair::Async
                                    : StoreConfig::ReadRepair::None;
        auto cluster = make_cluster(kernel, net_rng, svc_rng, config);

        const_cast<Replica&>(cluster.replica(0))
            .apply(3, {91, {SimTime{5}, 1}});
        const_cast<Replica&>(cluster.replica(1))
            .apply(3, {92, {SimTime{9}, 2}});

        std::int64_t got = -1;
        cluster.submit_read(0, 3, ConsistencyLevel::Quorum,
                            [&](const ReadOutcome& o) { got = o.value_id; });
        kernel.run_until_idle();
        CHECK(got == 92);
        CHECK(cluster.replica(0).read(3).value_id == (repair ? 92 : 91));
    }
}

TEST_CASE("late stale responses trigger repair after a ONE read completes")
{
    SimKernel kernel;
    RngStream net_rng(1, "net");
    RngStream svc_rng(1, "svc");
    StoreConfig config;
    config.hosts = 2;
    config.rf = 2;
    config.read_repair = StoreConfig::ReadRepair::Async;
    auto cluster = make_cluster(kernel, net_rng, svc_rng, config);

    const_cast<Replica&>(cluster.replica(0)).apply(3, {92, {SimTime{9}, 2}});
    const_cast<Replica&>(cluster.replica(1)).apply(3, {91, {SimTime{5}, 1}});

    std::int64_t got = -1;
    cluster.submit_read(0, 3, ConsistencyLevel::One,
                        [&](const ReadOutcome& o) { got = o.value_id; });
    kernel.run_until_idle();
    CHECK(got == 92);
    CHECK(cluster.replica(1).read(3).value_id == 92);
}
