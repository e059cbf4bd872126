#pragma once

#include "quorumsim/kernel.hpp"
#include "quorumsim/latency_model.hpp"
#include "quorumsim/rng.hpp"
#include "quorumsim/trace.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <vector>

namespace quorumsim {

// Conflict-resolution stamp: coordinator clock at write dispatch plus a
// globally unique sequence tie-break. Total order by (ts, writer_seq).
struct WriteStamp {
    SimTime ts = SimTime::min();
    std::int64_t writer_seq = -1;

    auto operator<=>(const WriteStamp&) const = default;
};

struct Versioned {
    std::int64_t value_id = kInitialValueId;
    WriteStamp stamp{};

    bool operator==(const Versioned&) const = default;
};

// Required replica acks for a level at replication factor rf:
// One -> 1, Quorum -> floor(rf/2)+1, All -> rf.
int required_acks(ConsistencyLevel level, int rf);

// Per-host last-write-wins register map. Applied stamps never regress.
class Replica {
public:
    // Keeps the version with the greater (ts, writer_seq); equal stamps keep
    // the resident version. Throws if the stored stamp would regress, which
    // would mean the LWW rule itself is broken.
    void apply(std::int64_t key, const Versioned& incoming);

    // Never-written keys serve the initial value with a minimal stamp.
    Versioned read(std::int64_t key) const;

    // Sorted snapshot, for convergence checks in tests.
    std::map<std::int64_t, Versioned> snapshot() const;

private:
    std::unordered_map<std::int64_t, Versioned> kv_;
};

struct StoreConfig {
    int hosts = 2;
    int rf = 3;

    enum class ReadRepair { None, Async };
    ReadRepair read_repair = ReadRepair::None;
};

struct ReadOutcome {
    std::int64_t value_id = kInitialValueId;
    WriteStamp stamp{};
    SimTime dispatch{};
    SimTime response{};
};

struct WriteOutcome {
    WriteStamp stamp{};
    SimTime dispatch{};
    SimTime response{};
};

// The simulated cluster: one coordinator+replica pair per host. Coordinators
// fan every request to all replicas of the key and complete the client
// operation after the level-selected ack count; remaining deliveries still
// apply, which is what makes replicas converge. Values resolve by LWW.
class ClusterSim {
public:
    ClusterSim(SimKernel& kernel, StoreConfig config, NetworkModel net,
               ServiceModel svc, RngStream& net_rng, RngStream& svc_rng);

    void submit_read(int host, std::int64_t key, ConsistencyLevel level,
                     std::function<void(const ReadOutcome&)> done);
    void submit_write(int host, std::int64_t key, std::int64_t value_id,
                      ConsistencyLevel level,
                      std::function<void(const WriteOutcome&)> done);

    // Replica placement: the min(rf, hosts) distinct hosts starting at
    // key mod hosts. With rf > hosts every host replicates every key and the
    // ack requirement is clamped to the group size, mirroring how a real
    // cluster with SimpleStrategy degrades when rf exceeds the ring.
    std::vector<int> replica_hosts(std::int64_t key) const;
    int replica_group_size() const noexcept;
    int acks_required(ConsistencyLevel level) const;

    int host_count() const noexcept { return config_.hosts; }
    const Replica& replica(int host) const { return replicas_[host]; }

    // Optional protocol ledger (store-level dispatch/response/stamps) for
    // post-hoc invariant checks.
    struct LedgerEntry {
        OpKind kind = OpKind::Read;
        std::int64_t key = 0;
        std::int64_t value_id = 0;
        WriteStamp stamp{};
        SimTime dispatch{};
        SimTime response{};
    };
    void enable_ledger(bool on) { ledger_enabled_ = on; }
    const std::vector<LedgerEntry>& ledger() const { return ledger_; }

private:
    struct ReadResponse {
        Versioned version{};
        int responder = 0;
    };
    struct PendingRead {
        std::int64_t key = 0;
        int coordinator = 0;
        int required = 0;
        int outstanding = 0;
        bool completed = false;
        Versioned winner{};
        std::vector<ReadResponse> received;
        std::function<void(const ReadOutcome&)> done;
        SimTime dispatch{};
    };
    struct PendingWrite {
        int coordinator = 0;
        int required = 0;
        int outstanding = 0;
        int acks = 0;
        bool completed = false;
        WriteStamp stamp{};
        std::function<void(const WriteOutcome&)> done;
        SimTime dispatch{};
        std::int64_t key = 0;
        std::int64_t value_id = 0;
    };

    DurationUs link_delay(int from_host, int to_host);
    void deliver_read_request(std::uint64_t token, int replica_host);
    void handle_read_response(std::uint64_t token, int replica_host,
                              const Versioned& version);
    void deliver_write_request(std::uint64_t token, int replica_host);
    void handle_write_ack(std::uint64_t token);
    void send_repair(int coordinator, int replica_host, std::int64_t key,
                     const Versioned& winner);

    SimKernel& kernel_;
    StoreConfig config_;
    NetworkModel net_;
    ServiceModel svc_;
    RngStream& net_rng_;
    RngStream& svc_rng_;

    std::vector<Replica> replicas_;
    std::unordered_map<std::uint64_t, PendingRead> pending_reads_;
    std::unordered_map<std::uint64_t, PendingWrite> pending_writes_;
    std::uint64_t next_token_ = 0;
    std::int64_t next_writer_seq_ = 0;

    bool ledger_enabled_ = false;
    std::vector<LedgerEntry> ledger_;
};

} // namespace quorumsim
