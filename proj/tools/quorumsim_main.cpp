// quorumsim: experiment driver for the quorum-replicated store simulator.
//
// Subcommands:
//   run      one simulation -> trace CSV + report JSON
//   sweep    one parameter over a value list -> CSV table
//   analyze  score an existing trace -> report JSON
//   oracle   per-key minimal stretch vs. zone scores, for validation
//
// Exit codes: 0 success, 2 usage/config error, 3 I/O error.

#include "quorumsim/experiment.hpp"
#include "quorumsim/gamma.hpp"
#include "quorumsim/metrics.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

using namespace quorumsim;

constexpr const char* kConfigEnvVar = "QUORUMSIM_CONFIG";

// Precedence: defaults < profile < config file < --set overrides.
ExperimentConfig resolve_config(const std::string& config_path,
                                const std::string& profile,
                                const std::vector<std::string>& sets)
{
    ExperimentConfig config;
    if (!profile.empty()) {
        config.apply_profile(profile);
    }
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(kConfigEnvVar)) {
            path = env;
        }
    }
    if (!path.empty()) {
        config.load_file(path);
    }
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return config;
}

std::vector<std::string> split_values(const std::string& csv)
{
    std::vector<std::string> values;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        if (comma == std::string::npos) {
            if (start < csv.size()) {
                values.push_back(csv.substr(start));
            }
            break;
        }
        if (comma > start) {
            values.push_back(csv.substr(start, comma - start));
        }
        start = comma + 1;
    }
    return values;
}

void write_text_file(const std::string& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open output file: " + path);
    }
    out << body;
    if (!out) {
        throw IoError("failed writing output file: " + path);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"quorum-replicated store simulator and trace analyzer"};
    app.require_subcommand(1);

    std::string config_path;
    std::string profile;
    std::vector<std::string> sets;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "config file (default: $QUORUMSIM_CONFIG)");
        cmd->add_option("--profile", profile, "desk|paper preset");
        cmd->add_option("--set", sets, "override: key=value")
            ->take_all();
    };

    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common(run_cmd);
    std::string trace_out;
    std::string report_out;
    run_cmd->add_option("--trace", trace_out, "trace CSV output path");
    run_cmd->add_option("--report", report_out, "report JSON output path");

    auto* sweep_cmd =
        app.add_subcommand("sweep", "sweep one parameter over values");
    add_common(sweep_cmd);
    std::string sweep_param;
    std::string sweep_values;
    int sweep_seeds = 1;
    std::string sweep_out;
    sweep_cmd->add_option("--param", sweep_param, "config key to vary")
        ->required();
    sweep_cmd
        ->add_option("--values", sweep_values, "comma-separated value list")
        ->required();
    sweep_cmd->add_option("--seeds", sweep_seeds, "seeds per point");
    sweep_cmd->add_option("--out", sweep_out, "CSV output path (default stdout)");

    auto* analyze_cmd =
        app.add_subcommand("analyze", "score a trace file");
    std::string analyze_trace;
    std::int64_t analyze_threshold = 2000;
    std::string analyze_out;
    analyze_cmd->add_option("trace", analyze_trace, "trace CSV path")
        ->required();
    analyze_cmd->add_option("--threshold-us", analyze_threshold,
                            "noise threshold in microseconds");
    analyze_cmd->add_option("--out", analyze_out,
                            "report JSON output path (default stdout)");

    auto* oracle_cmd = app.add_subcommand(
        "oracle", "per-key minimal stretch vs. zone scores");
    std::string oracle_trace;
    std::size_t oracle_max_ops = kOracleMaxOps;
    oracle_cmd->add_option("trace", oracle_trace, "trace CSV path")
        ->required();
    oracle_cmd->add_option("--max-ops", oracle_max_ops,
                           "per-key operation limit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) {
            ExperimentConfig config =
                resolve_config(config_path, profile, sets);
            if (!trace_out.empty()) {
                config.out_trace = trace_out;
            }
            if (!report_out.empty()) {
                config.out_report = report_out;
            }
            const RunArtifacts artifacts = run_to_files(config);
            std::cout << "trace:  " << config.out_trace << "\n"
                      << "report: " << config.out_report << "\n";
            if (artifacts.report.throughput_shortfall) {
                std::cout << "note: throughput shortfall ("
                          << artifacts.report.throughput_ops_per_s
                          << " ops/s achieved)\n";
            }
        } else if (*sweep_cmd) {
            const ExperimentConfig base =
                resolve_config(config_path, profile, sets);
            SweepSpec spec;
            spec.param = sweep_param;
            spec.values = split_values(sweep_values);
            spec.seeds_per_point = sweep_seeds;
            const auto rows = run_sweep(base, spec);
            const std::string csv = sweep_to_csv(rows);
            if (sweep_out.empty()) {
                std::cout << csv;
            } else {
                write_text_file(sweep_out, csv);
                std::cout << "sweep: " << sweep_out << "\n";
            }
        } else if (*analyze_cmd) {
            const ScoreReport report =
                analyze_trace_file(analyze_trace, analyze_threshold);
            const std::string body = to_json(report);
            if (analyze_out.empty()) {
                std::cout << body;
            } else {
                write_text_file(analyze_out, body);
                std::cout << "report: " << analyze_out << "\n";
            }
        } else if (*oracle_cmd) {
            const auto results =
                oracle_trace_file(oracle_trace, oracle_max_ops);
            for (const auto& r : results) {
                if (r.skipped) {
                    std::cout << "key=" << r.key << " ops=" << r.op_count
                              << " skipped (over " << oracle_max_ops
                              << " ops)\n";
                } else {
                    std::cout << "key=" << r.key << " ops=" << r.op_count
                              << " min_stretch_us=" << r.min_stretch_us
                              << " zone_max_us=" << r.zone_max_us << ' '
                              << (r.agree ? "agree" : "DISAGREE") << "\n";
                }
            }
        }
    } catch (const TraceParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
