#include "quorumsim/store.hpp"

#include <algorithm>
#include <stdexcept>

namespace quorumsim {

int required_acks(ConsistencyLevel level, int rf)
{
    if (rf < 1) {
        throw std::invalid_argument("required_acks: rf must be >= 1");
    }
    switch (level) {
    case ConsistencyLevel::One:
        return 1;
    case ConsistencyLevel::Quorum:
        return rf / 2 + 1;
    case ConsistencyLevel::All:
        return rf;
    }
    return rf;
}

void Replica::apply(std::int64_t key, const Versioned& incoming)
{
    auto [it, inserted] = kv_.try_emplace(key, incoming);
    if (inserted) {
        return;
    }
    const WriteStamp before = it->second.stamp;
    if (incoming.stamp > it->second.stamp) {
        it->second = incoming;
    }
    if (it->second.stamp < before) {
        throw std::logic_error("replica stamp regressed on apply");
    }
}

Versioned Replica::read(std::int64_t key) const
{
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
        return Versioned{};
    }
    return it->second;
}

std::map<std::int64_t, Versioned> Replica::snapshot() const
{
    return {kv_.begin(), kv_.end()};
}

ClusterSim::ClusterSim(SimKernel& kernel, StoreConfig config, NetworkModel net,
                       ServiceModel svc, RngStream& net_rng,
                       RngStream& svc_rng)
    : kernel_(kernel), config_(config), net_(std::move(net)),
      svc_(std::move(svc)), net_rng_(net_rng), svc_rng_(svc_rng)
{
    if (config_.hosts < 1 || config_.rf < 1) {
        throw std::invalid_argument("cluster needs hosts >= 1 and rf >= 1");
    }
    replicas_.resize(static_cast<std::size_t>(config_.hosts));
}

int ClusterSim::replica_group_size() const noexcept
{
    return std::min(config_.rf, config_.hosts);
}

std::vector<int> ClusterSim::replica_hosts(std::int64_t key) const
{
    const int hosts = config_.hosts;
    const int base = static_cast<int>(((key % hosts) + hosts) % hosts);
    std::vector<int> group;
    group.reserve(static_cast<std::size_t>(replica_group_size()));
    for (int i = 0; i < replica_group_size(); ++i) {
        group.push_back((base + i) % hosts);
    }
    return group;
}

int ClusterSim::acks_required(ConsistencyLevel level) const
{
    return std::min(required_acks(level, config_.rf), replica_group_size());
}

DurationUs ClusterSim::link_delay(int from_host, int to_host)
{
    if (from_host == to_host) {
        return net_.local_hop.sample(net_rng_);
    }
    return net_.one_way.sample(net_rng_);
}

void ClusterSim::submit_read(int host, std::int64_t key,
                             ConsistencyLevel level,
                             std::function<void(const ReadOutcome&)> done)
{
    const SimTime dispatch = kernel_.now();
    const std::uint64_t token = next_token_++;
    auto group = replica_hosts(key);

    PendingRead pending;
    pending.key = key;
    pending.coordinator = host;
    pending.required = acks_required(level);
    pending.outstanding = static_cast<int>(group.size());
    pending.done = std::move(done);
    pending.dispatch = dispatch;
    pending_reads_.emplace(token, std::move(pending));

    // Client -> local coordinator hop, then fan-out to every replica of the
    // key; the first `required` responses decide the result.
    kernel_.schedule_after(
        net_.local_hop.sample(net_rng_),
        [this, token, host, group = std::move(group)] {
            for (const int replica_host : group) {
                kernel_.schedule_after(link_delay(host, replica_host),
                                       [this, token, replica_host] {
                                           deliver_read_request(token,
                                                                replica_host);
                                       });
            }
        });
}

void ClusterSim::deliver_read_request(std::uint64_t token, int replica_host)
{
    const auto it = pending_reads_.find(token);
    if (it == pending_reads_.end()) {
        return;
    }
    const std::int64_t key = it->second.key;
    const int coordinator = it->second.coordinator;
    const DurationUs service = svc_.read_service.sample(svc_rng_);
    kernel_.schedule_after(
        service, [this, token, replica_host, key, coordinator] {
            // Register state is sampled at service completion.
            const Versioned version =
                replicas_[static_cast<std::size_t>(replica_host)].read(key);
            kernel_.schedule_after(link_delay(replica_host, coordinator),
                                   [this, token, replica_host, version] {
                                       handle_read_response(token,
                                                            replica_host,
                                                            version);
                                   });
        });
}

void ClusterSim::handle_read_response(std::uint64_t token, int replica_host,
                                      const Versioned& version)
{
    const auto it = pending_reads_.find(token);
    if (it == pending_reads_.end()) {
        return;
    }
    PendingRead& pending = it->second;
    --pending.outstanding;

    const bool repair_on =
        config_.read_repair == StoreConfig::ReadRepair::Async;

    if (!pending.completed) {
        pending.received.push_back({version, replica_host});
        if (static_cast<int>(pending.received.size()) >= pending.required) {
            pending.completed = true;
            Versioned winner = pending.received.front().version;
            for (const auto& r : pending.received) {
                if (r.version.stamp > winner.stamp) {
                    winner = r.version;
                }
            }
            pending.winner = winner;

            ReadOutcome outcome;
            outcome.value_id = winner.value_id;
            outcome.stamp = winner.stamp;
            outcome.dispatch = pending.dispatch;
            outcome.response = kernel_.now() + net_.local_hop.sample(net_rng_);
            if (ledger_enabled_) {
                ledger_.push_back({OpKind::Read, pending.key,
                                   outcome.value_id, outcome.stamp,
                                   outcome.dispatch, outcome.response});
            }
            auto done = pending.done;
            kernel_.schedule_at(outcome.response,
                                [done, outcome] { done(outcome); });

            if (repair_on) {
                for (const auto& r : pending.received) {
                    if (r.version.stamp < winner.stamp) {
                        send_repair(pending.coordinator, r.responder,
                                    pending.key, winner);
                    }
                }
            }
        }
    } else if (repair_on && version.stamp < pending.winner.stamp) {
        // Late response from a stale replica: write the winner back.
        send_repair(pending.coordinator, replica_host, pending.key,
                    pending.winner);
    }

    if (pending.outstanding == 0) {
        pending_reads_.erase(it);
    }
}

void ClusterSim::send_repair(int coordinator, int replica_host,
                             std::int64_t key, const Versioned& winner)
{
    // Fire-and-forget write-back of the freshest observed version.
    kernel_.schedule_after(
        link_delay(coordinator, replica_host),
        [this, replica_host, key, winner] {
            const DurationUs service = svc_.write_service.sample(svc_rng_);
            kernel_.schedule_after(service, [this, replica_host, key, winner] {
                replicas_[static_cast<std::size_t>(replica_host)].apply(
                    key, winner);
            });
        });
}

void ClusterSim::submit_write(int host, std::int64_t key,
                              std::int64_t value_id, ConsistencyLevel level,
                              std::function<void(const WriteOutcome&)> done)
{
    const SimTime dispatch = kernel_.now();
    const std::uint64_t token = next_token_++;
    auto group = replica_hosts(key);
    const int required = acks_required(level);

    kernel_.schedule_after(
        net_.local_hop.sample(net_rng_),
        [this, token, host, group = std::move(group), key, value_id, required,
         dispatch, done = std::move(done)]() mutable {
            // The stamp comes from the coordinator's clock at dispatch.
            PendingWrite pending;
            pending.coordinator = host;
            pending.required = required;
            pending.outstanding = static_cast<int>(group.size());
            pending.stamp = WriteStamp{kernel_.now(), next_writer_seq_++};
            pending.done = std::move(done);
            pending.dispatch = dispatch;
            pending.key = key;
            pending.value_id = value_id;
            pending_writes_.emplace(token, std::move(pending));

            for (const int replica_host : group) {
                kernel_.schedule_after(link_delay(host, replica_host),
                                       [this, token, replica_host] {
                                           deliver_write_request(token,
                                                                 replica_host);
                                       });
            }
        });
}

void ClusterSim::deliver_write_request(std::uint64_t token, int replica_host)
{
    const auto it = pending_writes_.find(token);
    if (it == pending_writes_.end()) {
        return;
    }
    const PendingWrite& pending = it->second;
    const std::int64_t key = pending.key;
    const int coordinator = pending.coordinator;
    const Versioned version{pending.value_id, pending.stamp};
    const DurationUs service = svc_.write_service.sample(svc_rng_);
    kernel_.schedule_after(
        service, [this, token, replica_host, coordinator, key, version] {
            replicas_[static_cast<std::size_t>(replica_host)].apply(key,
                                                                    version);
            kernel_.schedule_after(link_delay(replica_host, coordinator),
                                   [this, token] { handle_write_ack(token); });
        });
}

void ClusterSim::handle_write_ack(std::uint64_t token)
{
    const auto it = pending_writes_.find(token);
    if (it == pending_writes_.end()) {
        return;
    }
    PendingWrite& pending = it->second;
    --pending.outstanding;
    ++pending.acks;

    if (!pending.completed && pending.acks >= pending.required) {
        pending.completed = true;
        WriteOutcome outcome;
        outcome.stamp = pending.stamp;
        outcome.dispatch = pending.dispatch;
        outcome.response = kernel_.now() + net_.local_hop.sample(net_rng_);
        if (ledger_enabled_) {
            ledger_.push_back({OpKind::Write, pending.key, pending.value_id,
                               outcome.stamp, outcome.dispatch,
                               outcome.response});
        }
        auto done = pending.done;
        kernel_.schedule_at(outcome.response,
                            [done, outcome] { done(outcome); });
    }

    if (pending.outstanding == 0) {
        pending_writes_.erase(it);
    }
}

} // namespace quorumsim
