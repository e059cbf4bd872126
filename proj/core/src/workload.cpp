#include "quorumsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace quorumsim {

namespace {

double zeta(std::int64_t n, double theta)
{
    double sum = 0.0;
    for (std::int64_t i = 1; i <= n; ++i) {
        sum += 1.0 / std::pow(static_cast<double>(i), theta);
    }
    return sum;
}

} // namespace

void KeyDistribution::precompute()
{
    if (n < 0) {
        throw std::invalid_argument("key distribution: keyspace must be >= 0");
    }
    if (n == 0) {
        // Legal for load-only / zero-duration configurations; sampling from
        // an empty keyspace throws.
        return;
    }
    if (kind == Kind::Zipfian || kind == Kind::Latest) {
        if (!(theta >= 0.0 && theta < 1.0)) {
            throw std::invalid_argument(
                "key distribution: theta must be in [0,1)");
        }
        zetan_ = zeta(n, theta);
        zeta2_ = zeta(std::min<std::int64_t>(2, n), theta);
        alpha_ = 1.0 / (1.0 - theta);
        eta_ = (1.0 - std::pow(2.0 / static_cast<double>(n), 1.0 - theta)) /
               (1.0 - zeta2_ / zetan_);
    }
    if (kind == Kind::Hotspot) {
        if (!(hot_fraction > 0.0 && hot_fraction <= 1.0) ||
            !(hot_op_fraction >= 0.0 && hot_op_fraction <= 1.0)) {
            throw std::invalid_argument("key distribution: bad hotspot params");
        }
    }
}

KeyDistribution KeyDistribution::uniform(std::int64_t n)
{
    KeyDistribution d;
    d.kind = Kind::Uniform;
    d.n = n;
    d.precompute();
    return d;
}

KeyDistribution KeyDistribution::zipfian(std::int64_t n, double theta)
{
    KeyDistribution d;
    d.kind = Kind::Zipfian;
    d.n = n;
    d.theta = theta;
    d.precompute();
    return d;
}

KeyDistribution KeyDistribution::latest(std::int64_t n, double theta)
{
    KeyDistribution d;
    d.kind = Kind::Latest;
    d.n = n;
    d.theta = theta;
    d.precompute();
    return d;
}

KeyDistribution KeyDistribution::hotspot(std::int64_t n, double hot_fraction,
                                         double hot_op_fraction)
{
    KeyDistribution d;
    d.kind = Kind::Hotspot;
    d.n = n;
    d.hot_fraction = hot_fraction;
    d.hot_op_fraction = hot_op_fraction;
    d.precompute();
    return d;
}

std::int64_t KeyDistribution::zipf_rank(RngStream& rng) const
{
    if (n == 1) {
        return 0;
    }
    const double u = rng.next_double();
    const double uz = u * zetan_;
    if (uz < 1.0) {
        return 0;
    }
    if (uz < 1.0 + std::pow(0.5, theta)) {
        return 1;
    }
    const auto rank = static_cast<std::int64_t>(
        static_cast<double>(n) * std::pow(eta_ * u - eta_ + 1.0, alpha_));
    return std::clamp<std::int64_t>(rank, 0, n - 1);
}

std::int64_t KeyDistribution::sample(RngStream& rng) const
{
    if (n == 0) {
        throw std::logic_error("key distribution: sampling empty keyspace");
    }
    switch (kind) {
    case Kind::Uniform:
        return static_cast<std::int64_t>(
            rng.next_below(static_cast<std::uint64_t>(n)));
    case Kind::Zipfian:
        return zipf_rank(rng);
    case Kind::Latest:
        // Rank 0 is the newest key, i.e. the highest index.
        return n - 1 - zipf_rank(rng);
    case Kind::Hotspot: {
        const auto hot_size = static_cast<std::int64_t>(
            std::ceil(hot_fraction * static_cast<double>(n)));
        if (rng.next_double() < hot_op_fraction) {
            return static_cast<std::int64_t>(
                rng.next_below(static_cast<std::uint64_t>(hot_size)));
        }
        if (hot_size >= n) {
            return static_cast<std::int64_t>(
                rng.next_below(static_cast<std::uint64_t>(n)));
        }
        return hot_size + static_cast<std::int64_t>(rng.next_below(
                              static_cast<std::uint64_t>(n - hot_size)));
    }
    }
    return 0;
}

OpKind next_op_kind(double read_fraction, RngStream& rng)
{
    return rng.next_double() < read_fraction ? OpKind::Read : OpKind::Write;
}

void WorkloadConfig::validate() const
{
    if (!(read_fraction >= 0.0 && read_fraction <= 1.0)) {
        throw std::invalid_argument("workload: read_fraction must be in [0,1]");
    }
    if (clients_per_host < 1) {
        throw std::invalid_argument("workload: clients_per_host must be >= 1");
    }
    if (!(target_ops_per_host_per_s > 0.0)) {
        throw std::invalid_argument("workload: target rate must be > 0");
    }
    if (duration_s < 0.0) {
        throw std::invalid_argument("workload: duration must be >= 0");
    }
    if (clock_skew_bound_us < 0) {
        throw std::invalid_argument("workload: skew bound must be >= 0");
    }
}

namespace {

// Shared mutable state for one workload run; clients are event-driven
// actors inside the single-threaded kernel, so plain members suffice.
struct RunState {
    SimKernel& kernel;
    ClusterSim& cluster;
    const WorkloadConfig& config;
    const PolicySpec& policy;

    RngStream key_rng;
    RngStream kind_rng;
    RngStream policy_rng;
    RngStream skew_rng;

    std::vector<OperationRecord> records;
    std::int64_t next_op_id = 0;
    std::int64_t next_value_id = kInitialValueId + 1;
    std::size_t txn_ops = 0;

    SimTime txn_start{};
    SimTime txn_end{};
    DurationUs interval_us = 0;

    RunState(SimKernel& k, ClusterSim& c, const WorkloadConfig& w,
             const PolicySpec& p, std::uint64_t seed)
        : kernel(k), cluster(c), config(w), policy(p),
          key_rng(seed, "wl.key"), kind_rng(seed, "wl.kind"),
          policy_rng(seed, "policy"), skew_rng(seed, "wl.skew")
    {
    }
};

struct Client {
    std::int64_t id = 0;
    int host = 0;
    DurationUs skew_us = 0;
    DurationUs phase_us = 0;
    std::int64_t next_slot = 0;
};

void record_op(RunState& state, const Client& client, std::int64_t op_id,
               std::int64_t key, OpKind kind, std::int64_t value_id,
               const Decision& decision, SimTime true_invoke,
               SimTime true_response)
{
    OperationRecord record;
    record.op_id = op_id;
    record.client_id = client.id;
    record.key = key;
    record.kind = kind;
    record.value_id = value_id;
    record.invoke = true_invoke + client.skew_us;
    record.response = true_response + client.skew_us;
    record.level_used = decision.level;
    record.pre_delay_us = decision.pre_delay_us;
    record.post_delay_us = decision.post_delay_us;
    state.records.push_back(record);
}

void issue_txn_op(RunState& state, Client& client);

void schedule_next(RunState& state, Client& client, SimTime completion)
{
    const SimTime target =
        state.txn_start + client.phase_us + client.next_slot * state.interval_us;
    const SimTime dispatch_at = std::max(completion, target);
    if (dispatch_at < state.txn_end) {
        ++client.next_slot;
        state.kernel.schedule_at(dispatch_at,
                                 [&state, &client] { issue_txn_op(state, client); });
    }
}

void issue_txn_op(RunState& state, Client& client)
{
    const SimTime true_dispatch = state.kernel.now();
    const OpKind kind = next_op_kind(state.config.read_fraction, state.kind_rng);
    const std::int64_t key = state.config.dist.sample(state.key_rng);
    const Decision decision = select(state.policy, kind, state.policy_rng);
    const std::int64_t op_id = state.next_op_id++;

    if (kind == OpKind::Write) {
        const std::int64_t value_id = state.next_value_id++;
        state.kernel.schedule_after(
            decision.pre_delay_us,
            [&state, &client, op_id, key, value_id, decision, true_dispatch] {
                state.cluster.submit_write(
                    client.host, key, value_id, decision.level,
                    [&state, &client, op_id, key, value_id, decision,
                     true_dispatch](const WriteOutcome& outcome) {
                        const auto recorded = apply_delay_accounting(
                            decision, true_dispatch, outcome.response);
                        record_op(state, client, op_id, key, OpKind::Write,
                                  value_id, decision, recorded.invoke,
                                  recorded.response);
                        ++state.txn_ops;
                        schedule_next(state, client, recorded.response);
                    });
            });
    } else {
        state.kernel.schedule_after(
            decision.pre_delay_us,
            [&state, &client, op_id, key, decision, true_dispatch] {
                state.cluster.submit_read(
                    client.host, key, decision.level,
                    [&state, &client, op_id, key, decision,
                     true_dispatch](const ReadOutcome& outcome) {
                        const auto recorded = apply_delay_accounting(
                            decision, true_dispatch, outcome.response);
                        record_op(state, client, op_id, key, OpKind::Read,
                                  outcome.value_id, decision, recorded.invoke,
                                  recorded.response);
                        ++state.txn_ops;
                        schedule_next(state, client, recorded.response);
                    });
            });
    }
}

// One initial write per key, sequentially per host loader at level All, so
// the keyspace is fully populated and converged before the transaction
// phase starts.
void load_next_key(RunState& state, Client& loader, std::int64_t key)
{
    if (key >= state.config.dist.n) {
        return;
    }
    const SimTime dispatch = state.kernel.now();
    const std::int64_t value_id = state.next_value_id++;
    const std::int64_t op_id = state.next_op_id++;
    const Decision level_all{ConsistencyLevel::All, 0, 0};
    state.cluster.submit_write(
        loader.host, key, value_id, ConsistencyLevel::All,
        [&state, &loader, key, op_id, value_id, level_all,
         dispatch](const WriteOutcome& outcome) {
            record_op(state, loader, op_id, key, OpKind::Write, value_id,
                      level_all, dispatch, outcome.response);
            load_next_key(state, loader, key + state.cluster.host_count());
        });
}

} // namespace

WorkloadResult run_workload(SimKernel& kernel, ClusterSim& cluster,
                            const WorkloadConfig& config,
                            const PolicySpec& policy, std::uint64_t seed)
{
    config.validate();
    policy.validate();

    RunState state(kernel, cluster, config, policy, seed);

    const int hosts = cluster.host_count();
    const int total_clients = hosts * config.clients_per_host;

    std::vector<std::unique_ptr<Client>> clients;
    clients.reserve(static_cast<std::size_t>(total_clients));
    for (int j = 0; j < config.clients_per_host; ++j) {
        for (int h = 0; h < hosts; ++h) {
            auto client = std::make_unique<Client>();
            client->id = h + static_cast<std::int64_t>(hosts) * j;
            client->host = h;
            clients.push_back(std::move(client));
        }
    }
    // Fixed per-client offsets, drawn in client id order.
    std::sort(clients.begin(), clients.end(),
              [](const auto& a, const auto& b) { return a->id < b->id; });
    for (auto& client : clients) {
        client->skew_us =
            config.clock_skew_bound_us == 0
                ? 0
                : state.skew_rng.next_in(-config.clock_skew_bound_us,
                                         config.clock_skew_bound_us);
    }

    // Load phase: one sequential loader per host (the host's first client).
    for (int h = 0; h < hosts; ++h) {
        Client& loader = *clients[static_cast<std::size_t>(h)];
        kernel.schedule_at(kernel.now(), [&state, &loader] {
            load_next_key(state, loader, loader.host);
        });
    }
    kernel.run_until_idle();
    const std::size_t load_ops = state.records.size();
    const std::int64_t first_txn_op_id = state.next_op_id;

    // Transaction phase: fixed-interval dispatch grid per client.
    state.interval_us = static_cast<DurationUs>(std::llround(
        1e6 * config.clients_per_host / config.target_ops_per_host_per_s));
    if (state.interval_us < 1) {
        state.interval_us = 1;
    }
    state.txn_start = kernel.now();
    state.txn_end =
        state.txn_start +
        static_cast<DurationUs>(std::llround(config.duration_s * 1e6));

    if (state.txn_end > state.txn_start) {
        for (std::size_t g = 0; g < clients.size(); ++g) {
            Client& client = *clients[g];
            client.phase_us = static_cast<DurationUs>(
                (static_cast<std::int64_t>(g) * state.interval_us) /
                total_clients);
            if (state.txn_start + client.phase_us >= state.txn_end) {
                continue;
            }
            kernel.schedule_at(state.txn_start + client.phase_us,
                               [&state, &client] {
                                   ++client.next_slot;
                                   issue_txn_op(state, client);
                               });
        }
        kernel.run_until_idle();
    }

    WorkloadResult result;
    result.load_ops = load_ops;
    result.txn_ops = state.txn_ops;
    result.first_txn_op_id = first_txn_op_id;
    result.txn_start = state.txn_start;
    result.txn_end = state.txn_end;
    if (config.duration_s > 0.0) {
        result.achieved_ops_per_s =
            static_cast<double>(state.txn_ops) / config.duration_s;
        const double target_total =
            config.target_ops_per_host_per_s * hosts;
        result.throughput_shortfall =
            result.achieved_ops_per_s < 0.99 * target_total;
    }

    std::sort(state.records.begin(), state.records.end(),
              [](const OperationRecord& a, const OperationRecord& b) {
                  return a.op_id < b.op_id;
              });
    result.trace.ops = std::move(state.records);
    result.trace.meta.seed = seed;
    result.trace.meta.duration_us = state.txn_end - state.txn_start;
    return result;
}

} // namespace quorumsim
