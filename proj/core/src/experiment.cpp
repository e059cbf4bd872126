#include "quorumsim/experiment.hpp"

#include "quorumsim/gamma.hpp"
#include "quorumsim/kernel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace quorumsim {

namespace {

std::string trim(std::string_view s)
{
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    while (first != last && std::isspace(static_cast<unsigned char>(*first))) {
        ++first;
    }
    while (last != first &&
           std::isspace(static_cast<unsigned char>(*(last - 1)))) {
        --last;
    }
    return std::string(first, last);
}

std::int64_t to_i64(std::string_view key, std::string_view value)
{
    std::int64_t v = 0;
    auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config: " + std::string(key) +
                          " expects an integer, got '" + std::string(value) +
                          "'");
    }
    return v;
}

double to_f64(std::string_view key, std::string_view value)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(value), &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: " + std::string(key) +
                          " expects a number, got '" + std::string(value) +
                          "'");
    }
}

bool to_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError("config: " + std::string(key) +
                      " expects true/false, got '" + std::string(value) + "'");
}

LatencyModel to_model(std::string_view key, std::string_view value)
{
    try {
        return LatencyModel::parse(value);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: " + std::string(key) + ": " + e.what());
    }
}

std::string format_double(double v)
{
    std::ostringstream out;
    out << v;
    return out.str();
}

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

} // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value)
{
    const std::string k(key);
    if (k == "cluster.hosts") {
        hosts = static_cast<int>(to_i64(key, value));
    } else if (k == "store.rf") {
        rf = static_cast<int>(to_i64(key, value));
    } else if (k == "store.read_repair") {
        if (value != "none" && value != "async") {
            throw ConfigError("config: store.read_repair is none|async");
        }
        read_repair = std::string(value);
    } else if (k == "net.one_way") {
        net_one_way = to_model(key, value);
    } else if (k == "local.hop") {
        local_hop = to_model(key, value);
    } else if (k == "svc.read") {
        svc_read = to_model(key, value);
    } else if (k == "svc.write") {
        svc_write = to_model(key, value);
    } else if (k == "wl.read_fraction") {
        wl_read_fraction = to_f64(key, value);
    } else if (k == "wl.dist") {
        if (value != "uniform" && value != "zipfian" && value != "latest" &&
            value != "hotspot") {
            throw ConfigError(
                "config: wl.dist is uniform|zipfian|latest|hotspot");
        }
        wl_dist = std::string(value);
    } else if (k == "wl.keyspace") {
        wl_keyspace = to_i64(key, value);
    } else if (k == "wl.clients") {
        wl_clients = static_cast<int>(to_i64(key, value));
    } else if (k == "wl.target_kops") {
        wl_target_kops = to_f64(key, value);
    } else if (k == "wl.duration_s") {
        wl_duration_s = to_f64(key, value);
    } else if (k == "wl.skew_us") {
        wl_skew_us = to_i64(key, value);
    } else if (k == "wl.theta") {
        wl_theta = to_f64(key, value);
    } else if (k == "wl.hot_fraction") {
        wl_hot_fraction = to_f64(key, value);
    } else if (k == "wl.hot_op_fraction") {
        wl_hot_op_fraction = to_f64(key, value);
    } else if (k == "wl.value_bytes") {
        wl_value_bytes = static_cast<int>(to_i64(key, value));
    } else if (k == "policy.kind") {
        if (value != "fixed" && value != "cpq" && value != "ad") {
            throw ConfigError("config: policy.kind is fixed|cpq|ad");
        }
        policy_kind = std::string(value);
    } else if (k == "policy.read") {
        policy_read = std::string(value);
    } else if (k == "policy.write") {
        policy_write = std::string(value);
    } else if (k == "policy.p") {
        policy_p = to_f64(key, value);
    } else if (k == "policy.low") {
        policy_low = std::string(value);
    } else if (k == "policy.high") {
        policy_high = std::string(value);
    } else if (k == "policy.read_delay_ms") {
        policy_read_delay_ms = to_f64(key, value);
    } else if (k == "policy.write_delay_ms") {
        policy_write_delay_ms = to_f64(key, value);
    } else if (k == "gamma.threshold_us") {
        gamma_threshold_us = to_i64(key, value);
    } else if (k == "metrics.per_host") {
        metrics_per_host = to_bool(key, value);
    } else if (k == "sla.l_ms") {
        sla_l_ms = to_f64(key, value);
    } else if (k == "sla.x") {
        sla_x = to_f64(key, value);
    } else if (k == "seed") {
        seed = static_cast<std::uint64_t>(to_i64(key, value));
    } else if (k == "out.trace") {
        out_trace = std::string(value);
    } else if (k == "out.report") {
        out_report = std::string(value);
    } else {
        throw ConfigError("config: unknown key '" + k + "'");
    }
}

void ExperimentConfig::apply_profile(std::string_view name)
{
    if (name == "desk") {
        // Defaults are the desk profile.
        return;
    }
    if (name == "paper") {
        hosts = 6;
        wl_clients = 768;
        wl_target_kops = 5.0;
        wl_duration_s = 60.0;
        return;
    }
    throw ConfigError("config: unknown profile '" + std::string(name) + "'");
}

void ExperimentConfig::load_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not key=value");
        }
        set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path)
{
    ExperimentConfig config;
    config.load_file(path);
    return config;
}

std::map<std::string, std::string> ExperimentConfig::canonical() const
{
    std::map<std::string, std::string> kv;
    kv["cluster.hosts"] = std::to_string(hosts);
    kv["store.rf"] = std::to_string(rf);
    kv["store.read_repair"] = read_repair;
    kv["net.one_way"] = net_one_way.to_string();
    kv["local.hop"] = local_hop.to_string();
    kv["svc.read"] = svc_read.to_string();
    kv["svc.write"] = svc_write.to_string();
    kv["wl.read_fraction"] = format_double(wl_read_fraction);
    kv["wl.dist"] = wl_dist;
    kv["wl.keyspace"] = std::to_string(wl_keyspace);
    kv["wl.clients"] = std::to_string(wl_clients);
    kv["wl.target_kops"] = format_double(wl_target_kops);
    kv["wl.duration_s"] = format_double(wl_duration_s);
    kv["wl.skew_us"] = std::to_string(wl_skew_us);
    kv["wl.theta"] = format_double(wl_theta);
    kv["wl.hot_fraction"] = format_double(wl_hot_fraction);
    kv["wl.hot_op_fraction"] = format_double(wl_hot_op_fraction);
    kv["wl.value_bytes"] = std::to_string(wl_value_bytes);
    kv["policy.kind"] = policy_kind;
    kv["policy.read"] = policy_read;
    kv["policy.write"] = policy_write;
    kv["policy.p"] = format_double(policy_p);
    kv["policy.low"] = policy_low;
    kv["policy.high"] = policy_high;
    kv["policy.read_delay_ms"] = format_double(policy_read_delay_ms);
    kv["policy.write_delay_ms"] = format_double(policy_write_delay_ms);
    kv["gamma.threshold_us"] = std::to_string(gamma_threshold_us);
    kv["metrics.per_host"] = metrics_per_host ? "true" : "false";
    kv["sla.l_ms"] = format_double(sla_l_ms);
    kv["sla.x"] = format_double(sla_x);
    return kv;
}

std::string ExperimentConfig::digest() const
{
    std::uint64_t h = kFnvOffset;
    const auto feed = [&h](std::string_view s) {
        for (const char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= kFnvPrime;
        }
    };
    for (const auto& [k, v] : canonical()) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

StoreConfig ExperimentConfig::store_config() const
{
    if (hosts < 1) {
        throw ConfigError("config: cluster.hosts must be >= 1");
    }
    if (rf < 1) {
        throw ConfigError("config: store.rf must be >= 1");
    }
    StoreConfig store;
    store.hosts = hosts;
    store.rf = rf;
    store.read_repair = read_repair == "async"
                            ? StoreConfig::ReadRepair::Async
                            : StoreConfig::ReadRepair::None;
    return store;
}

NetworkModel ExperimentConfig::network_model() const
{
    return NetworkModel{net_one_way, local_hop};
}

ServiceModel ExperimentConfig::service_model() const
{
    return ServiceModel{svc_read, svc_write};
}

WorkloadConfig ExperimentConfig::workload_config() const
{
    if (wl_clients < 1 || wl_clients % hosts != 0) {
        throw ConfigError(
            "config: wl.clients must be positive and divisible by "
            "cluster.hosts");
    }
    if (wl_keyspace == 0 && wl_duration_s > 0.0) {
        throw ConfigError(
            "config: wl.keyspace must be positive for a nonzero duration");
    }
    WorkloadConfig wl;
    wl.read_fraction = wl_read_fraction;
    wl.value_size_bytes = wl_value_bytes;
    wl.clients_per_host = wl_clients / hosts;
    wl.target_ops_per_host_per_s = wl_target_kops * 1000.0;
    wl.duration_s = wl_duration_s;
    wl.clock_skew_bound_us = wl_skew_us;
    try {
        if (wl_dist == "uniform") {
            wl.dist = KeyDistribution::uniform(wl_keyspace);
        } else if (wl_dist == "zipfian") {
            wl.dist = KeyDistribution::zipfian(wl_keyspace, wl_theta);
        } else if (wl_dist == "latest") {
            wl.dist = KeyDistribution::latest(wl_keyspace, wl_theta);
        } else {
            wl.dist = KeyDistribution::hotspot(wl_keyspace, wl_hot_fraction,
                                               wl_hot_op_fraction);
        }
        wl.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return wl;
}

PolicySpec ExperimentConfig::policy_spec() const
{
    PolicySpec policy;
    try {
        if (policy_kind == "fixed") {
            policy.kind = PolicySpec::Kind::Fixed;
            policy.read_level = parse_level(policy_read);
            policy.write_level = parse_level(policy_write);
        } else if (policy_kind == "cpq") {
            policy.kind = PolicySpec::Kind::Cpq;
            policy.p = policy_p;
            policy.low = parse_level(policy_low);
            policy.high = parse_level(policy_high);
        } else {
            policy.kind = PolicySpec::Kind::Ad;
            policy.read_level = parse_level(policy_read);
            policy.write_level = parse_level(policy_write);
            policy.read_pre_delay_us = static_cast<DurationUs>(
                std::llround(policy_read_delay_ms * 1000.0));
            policy.write_post_delay_us = static_cast<DurationUs>(
                std::llround(policy_write_delay_ms * 1000.0));
        }
        policy.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return policy;
}

SlaSpec ExperimentConfig::sla_spec() const
{
    if (!(sla_l_ms > 0.0) || !(sla_x >= 0.0 && sla_x < 1.0)) {
        throw ConfigError("config: sla.l_ms must be > 0 and sla.x in [0,1)");
    }
    return SlaSpec{sla_l_ms, sla_x};
}

RunArtifacts run_experiment(const ExperimentConfig& config,
                            bool capture_internals)
{
    const StoreConfig store = config.store_config();
    const WorkloadConfig wl = config.workload_config();
    const PolicySpec policy = config.policy_spec();
    const SlaSpec sla = config.sla_spec();

    SimKernel kernel;
    RngStream net_rng(config.seed, "net");
    RngStream svc_rng(config.seed, "svc");
    ClusterSim cluster(kernel, store, config.network_model(),
                       config.service_model(), net_rng, svc_rng);
    cluster.enable_ledger(capture_internals);

    RunArtifacts artifacts;
    artifacts.workload =
        run_workload(kernel, cluster, wl, policy, config.seed);
    artifacts.trace = std::move(artifacts.workload.trace);
    artifacts.trace.meta.config_digest = config.digest();

    if (capture_internals) {
        artifacts.ledger = cluster.ledger();
        for (int h = 0; h < cluster.host_count(); ++h) {
            artifacts.replica_snapshots.push_back(
                cluster.replica(h).snapshot());
        }
    }

    // Gamma analysis sees the whole trace; latency/throughput statistics
    // cover the transaction phase only.
    RunReport report;
    report.config_digest = artifacts.trace.meta.config_digest;
    report.seed = config.seed;
    report.gamma = score_trace(artifacts.trace, config.gamma_threshold_us);

    const auto txn_begin = std::lower_bound(
        artifacts.trace.ops.begin(), artifacts.trace.ops.end(),
        artifacts.workload.first_txn_op_id,
        [](const OperationRecord& op, std::int64_t id) {
            return op.op_id < id;
        });
    const auto txn_offset =
        static_cast<std::size_t>(txn_begin - artifacts.trace.ops.begin());
    const std::span<const OperationRecord> txn_ops(
        artifacts.trace.ops.data() + txn_offset,
        artifacts.trace.ops.size() - txn_offset);
    report.latency = summarize(txn_ops);
    report.throughput_ops_per_s = artifacts.workload.achieved_ops_per_s;
    report.throughput_shortfall = artifacts.workload.throughput_shortfall;
    report.sla = sla;
    report.verdict = sla_check(report.latency, report.gamma, sla);
    if (config.metrics_per_host) {
        report.per_host_mode = true;
        report.read_p95_per_host_avg_us =
            per_host_p95_avg(txn_ops, OpKind::Read, config.hosts);
        report.write_p95_per_host_avg_us =
            per_host_p95_avg(txn_ops, OpKind::Write, config.hosts);
    }
    artifacts.report = std::move(report);
    return artifacts;
}

RunArtifacts run_to_files(const ExperimentConfig& config)
{
    RunArtifacts artifacts = run_experiment(config);
    save_trace(artifacts.trace, config.out_trace);
    std::ofstream out(config.out_report, std::ios::binary);
    if (!out) {
        throw IoError("cannot open report file for writing: " +
                      config.out_report);
    }
    out << to_json(artifacts.report);
    if (!out) {
        throw IoError("failed writing report file: " + config.out_report);
    }
    return artifacts;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base,
                                const SweepSpec& spec)
{
    if (spec.values.empty()) {
        throw ConfigError("sweep: empty value list");
    }
    if (spec.seeds_per_point < 1) {
        throw ConfigError("sweep: seeds_per_point must be >= 1");
    }
    {
        // Fail fast on an unknown parameter path.
        ExperimentConfig probe = base;
        probe.set(spec.param, spec.values.front());
    }

    std::vector<SweepRow> rows;
    for (const auto& value : spec.values) {
        for (int s = 0; s < spec.seeds_per_point; ++s) {
            ExperimentConfig point = base;
            point.set(spec.param, value);
            point.seed = base.seed + static_cast<std::uint64_t>(s);
            const RunArtifacts artifacts = run_experiment(point);
            SweepRow row;
            row.param = spec.param;
            row.value = value;
            row.seed = point.seed;
            row.proportion_positive =
                artifacts.report.gamma.proportion_positive;
            row.read_p95_us = artifacts.report.latency.read.p95_us;
            row.write_p95_us = artifacts.report.latency.write.p95_us;
            row.throughput_ops_per_s = artifacts.report.throughput_ops_per_s;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows)
{
    std::ostringstream out;
    out << "param,value,seed,proportion_positive,read_p95_us,write_p95_us,"
           "throughput_ops_per_s\n";
    for (const auto& row : rows) {
        out << row.param << ',' << row.value << ',' << row.seed << ','
            << row.proportion_positive << ',' << row.read_p95_us << ','
            << row.write_p95_us << ',' << row.throughput_ops_per_s << "\n";
    }
    return out.str();
}

ScoreReport analyze_trace_file(const std::filesystem::path& trace_path,
                               DurationUs threshold_us)
{
    const Trace raw = load_trace(trace_path);
    const Trace trace = insert_synthetic_initial_writes(raw);
    const auto violations = validate_trace(trace);
    if (!violations.empty()) {
        throw ConfigError("analyze: trace invalid: op " +
                          std::to_string(violations.front().op_id) + ": " +
                          violations.front().rule);
    }
    return score_trace(trace, threshold_us);
}

std::vector<OracleKeyResult>
oracle_trace_file(const std::filesystem::path& trace_path,
                  std::size_t max_ops)
{
    const Trace trace =
        insert_synthetic_initial_writes(load_trace(trace_path));
    std::map<std::int64_t, std::vector<OperationRecord>> by_key;
    for (const auto& op : trace.ops) {
        by_key[op.key].push_back(op);
    }
    ScoreMap scores;
    {
        const auto clusters = build_clusters(trace);
        scores = per_value_scores(clusters);
    }

    std::vector<OracleKeyResult> results;
    for (const auto& [key, ops] : by_key) {
        OracleKeyResult result;
        result.key = key;
        result.op_count = ops.size();
        for (const auto& [vk, gamma] : scores) {
            if (vk.first == key) {
                result.zone_max_us = std::max(result.zone_max_us, gamma);
            }
        }
        if (ops.size() > max_ops) {
            result.skipped = true;
        } else {
            result.min_stretch_us = min_stretch_oracle(ops);
            result.agree = result.min_stretch_us == result.zone_max_us;
        }
        results.push_back(result);
    }
    return results;
}

} // namespace quorumsim
