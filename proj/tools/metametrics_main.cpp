// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands: validate, compute, gates, heatmap,
// generate, fixture. Results go to standard output (or --out), diagnostics to
// standard error. Exit codes: 0 success, 1 gate failure (gates only),
// 2 usage error, 3 data error.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "metametrics/metametrics.hpp"

namespace mm = metametrics;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGateFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

int exit_code_for(const mm::Error& err) {
    switch (err.code()) {
        case mm::ErrorCode::OutOfRange:
        case mm::ErrorCode::InvalidGateOrder:
        case mm::ErrorCode::EmptyPolicy:
        case mm::ErrorCode::InvalidPolicy:
        case mm::ErrorCode::NoSelectors:
        case mm::ErrorCode::InvalidConfig:
            return kExitUsage;
        default:
            return kExitData;
    }
}

unsigned thread_cap() {
    const char* env = std::getenv("METAMETRICS_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v > 4096) {
        throw mm::Error(mm::ErrorCode::InvalidConfig,
                        "METAMETRICS_THREADS must be an integer in 0..4096 (0 = auto)");
    }
    return static_cast<unsigned>(v);
}

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw mm::Error(mm::ErrorCode::IoError, "cannot open '" + path + "' for writing", path);
    }
    out << content;
    out.flush();
    if (!out) throw mm::Error(mm::ErrorCode::IoError, "write failed for '" + path + "'", path);
}

struct InputFlags {
    std::string input;
    bool lenient = false;
    bool renumber = false;

    mm::LoadOptions load_options() const { return mm::LoadOptions{lenient, renumber}; }
};

void add_input_flags(CLI::App* cmd, InputFlags& flags) {
    cmd->add_option("--input", flags.input, "History file (JSON Lines)")->required();
    cmd->add_flag("--lenient", flags.lenient, "Ignore unknown record keys");
    cmd->add_flag("--renumber", flags.renumber,
                  "Remap each artifact's revisions to dense 1..N");
}

mm::ReportFormat parse_format(const std::string& name) {
    return name == "markdown" ? mm::ReportFormat::Markdown : mm::ReportFormat::Json;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meta-metrics over per-revision test and simulation results"};
    app.require_subcommand(1);

    // validate
    InputFlags validate_in;
    bool collect_errors = false;
    CLI::App* validate = app.add_subcommand("validate", "Check a history file");
    add_input_flags(validate, validate_in);
    validate->add_flag("--collect-errors", collect_errors,
                       "Report every issue instead of stopping at the first");

    // compute
    InputFlags compute_in;
    std::vector<std::uint32_t> compute_gates;
    std::vector<std::string> compute_indicators;
    std::vector<std::string> compute_situations;
    std::string compute_format = "json";
    bool compute_strict_eq7 = false;
    bool compute_stamp = false;
    CLI::App* compute = app.add_subcommand("compute", "Compute metrics at gates");
    add_input_flags(compute, compute_in);
    compute->add_option("--gate", compute_gates, "Gate revision (repeatable, ascending)")
        ->required();
    compute->add_option("--indicator", compute_indicators,
                        "Indicator for relative-level comparison (repeatable)")
        ->check(CLI::IsMember({"misra_warnings", "mccabe", "uncovered"}));
    compute->add_option("--situation", compute_situations,
                        "Situation id for acting-time variance (repeatable)");
    compute->add_option("--format", compute_format, "Output format")
        ->check(CLI::IsMember({"json", "markdown"}));
    compute->add_flag("--strict-eq7", compute_strict_eq7,
                      "Charge failing revisions to the acting-time deviation sum");
    compute->add_flag("--stamp", compute_stamp, "Embed a generation timestamp");

    // gates
    InputFlags gates_in;
    std::string policy_path;
    std::string gates_format = "json";
    bool gates_strict_eq7 = false;
    bool gates_stamp = false;
    CLI::App* gates = app.add_subcommand("gates", "Evaluate a gate policy");
    add_input_flags(gates, gates_in);
    gates->add_option("--policy", policy_path, "Gate policy JSON file")->required();
    gates->add_option("--format", gates_format, "Output format")
        ->check(CLI::IsMember({"json", "markdown"}));
    gates->add_flag("--strict-eq7", gates_strict_eq7,
                    "Charge failing revisions to the acting-time deviation sum");
    gates->add_flag("--stamp", gates_stamp, "Embed a generation timestamp");

    // heatmap
    InputFlags heatmap_in;
    std::vector<std::uint32_t> heatmap_gates;
    std::vector<std::string> heatmap_metrics;
    std::string heatmap_out;
    bool heatmap_strict_eq7 = false;
    CLI::App* heatmap = app.add_subcommand("heatmap", "Emit a cross-artifact anomaly CSV");
    add_input_flags(heatmap, heatmap_in);
    heatmap->add_option("--gate", heatmap_gates,
                        "Gate revision (repeatable; cells read the last gate)")
        ->required();
    heatmap->add_option("--metric", heatmap_metrics,
                        "Column selector, e.g. r_plus, q2, q4:mccabe, q6:cutin (repeatable)")
        ->required();
    heatmap->add_option("--out", heatmap_out, "Output CSV path, - for stdout")->required();
    heatmap->add_flag("--strict-eq7", heatmap_strict_eq7,
                      "Charge failing revisions to the acting-time deviation sum");

    // generate
    std::string generate_config;
    std::string generate_out;
    CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic history file");
    generate->add_option("--config", generate_config, "Generator config JSON file")->required();
    generate->add_option("--out", generate_out, "Output path, - for stdout")->required();

    // fixture
    std::string fixture_out;
    CLI::App* fixture = app.add_subcommand("fixture", "Write the built-in 892-revision history");
    fixture->add_option("--out", fixture_out, "Output path, - for stdout")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const unsigned threads = thread_cap();

        if (validate->parsed()) {
            const mm::LoadResult result =
                mm::try_load_history_file(validate_in.input, validate_in.load_options());
            if (!result.ok()) {
                const std::size_t shown = collect_errors ? result.issues.size() : 1;
                for (std::size_t i = 0; i < shown; ++i) {
                    const mm::LoadIssue& issue = result.issues[i];
                    std::cerr << "error";
                    if (issue.line > 0) std::cerr << " (line " << issue.line << ")";
                    std::cerr << ": " << issue.message << "\n";
                }
                if (!collect_errors && result.issues.size() > 1) {
                    std::cerr << "(" << result.issues.size() - 1
                              << " further issue(s); rerun with --collect-errors)\n";
                }
                return kExitData;
            }
            std::cout << "ok: " << result.set.size() << " artifact(s), "
                      << result.set.total_revisions() << " revision(s)\n";
            return kExitOk;
        }

        if (compute->parsed()) {
            mm::ComputeOptions options;
            options.indicators = compute_indicators;
            for (const std::string& id : compute_situations) {
                if (id.empty()) {
                    throw mm::Error(mm::ErrorCode::InvalidPolicy,
                                    "--situation must be non-empty");
                }
                options.situations.push_back(id);
            }
            options.variance_mode = compute_strict_eq7 ? mm::VarianceMode::StrictAllZero
                                                       : mm::VarianceMode::PassesOnly;
            const mm::HistorySet set =
                mm::load_history_file(compute_in.input, compute_in.load_options());
            const std::vector<mm::MetricsReport> reports =
                mm::compute_reports(set, compute_gates, options, threads);
            mm::RenderOptions render;
            if (compute_stamp) render.stamp = utc_stamp();
            std::cout << mm::render_report(reports, {}, parse_format(compute_format), render);
            return kExitOk;
        }

        if (gates->parsed()) {
            const mm::GatePolicy policy = mm::GatePolicy::load(policy_path);
            const mm::HistorySet set =
                mm::load_history_file(gates_in.input, gates_in.load_options());
            const mm::VarianceMode mode = gates_strict_eq7 ? mm::VarianceMode::StrictAllZero
                                                           : mm::VarianceMode::PassesOnly;
            const mm::PolicyRun run = mm::run_gate_policy(set, policy, mode, threads);
            mm::RenderOptions render;
            if (gates_stamp) render.stamp = utc_stamp();
            std::cout << mm::render_report(run.reports, run.verdicts,
                                           parse_format(gates_format), render);
            return run.any_fail() ? kExitGateFailure : kExitOk;
        }

        if (heatmap->parsed()) {
            std::vector<mm::MetricSelector> selectors;
            mm::ComputeOptions options;
            for (const std::string& text : heatmap_metrics) {
                mm::MetricSelector sel = mm::MetricSelector::parse(text);
                if (sel.kind == mm::SelectorKind::Q4) options.indicators.push_back(sel.arg);
                if (sel.kind == mm::SelectorKind::Q6) options.situations.push_back(sel.arg);
                selectors.push_back(std::move(sel));
            }
            options.variance_mode = heatmap_strict_eq7 ? mm::VarianceMode::StrictAllZero
                                                       : mm::VarianceMode::PassesOnly;
            const mm::HistorySet set =
                mm::load_history_file(heatmap_in.input, heatmap_in.load_options());
            const std::vector<mm::MetricsReport> reports =
                mm::compute_reports(set, heatmap_gates, options, threads);
            const mm::HeatmapMatrix matrix =
                mm::build_heatmap(reports, selectors, heatmap_gates.back());
            write_output(heatmap_out, mm::render_heatmap_csv(matrix));
            return kExitOk;
        }

        if (generate->parsed()) {
            const mm::synth::GeneratorConfig config =
                mm::synth::GeneratorConfig::load(generate_config);
            const mm::HistorySet set = mm::synth::generate(config);
            std::ostringstream buffer;
            mm::write_history_set(set, buffer);
            write_output(generate_out, buffer.str());
            return kExitOk;
        }

        if (fixture->parsed()) {
            mm::HistorySet set;
            set.insert(mm::synth::ccs_fixture());
            std::ostringstream buffer;
            mm::write_history_set(set, buffer);
            write_output(fixture_out, buffer.str());
            return kExitOk;
        }
    } catch (const mm::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
