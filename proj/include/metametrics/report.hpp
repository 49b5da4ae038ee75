// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Gate-policy evaluation, cross-artifact anomaly heatmaps, and report
// rendering (JSON and markdown). All functions here are pure and their
// outputs are byte-deterministic for equal inputs.

#ifndef METAMETRICS_REPORT_HPP
#define METAMETRICS_REPORT_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "metametrics/detail/text.hpp"
#include "metametrics/error.hpp"
#include "metametrics/history.hpp"
#include "metametrics/metrics.hpp"

namespace metametrics {

// ---------------------------------------------------------------------------
// Metric selectors
// ---------------------------------------------------------------------------

/// What a heatmap column or a policy rule points at. Base figures and q3 read
/// from a single gate; q1/q2/q4/q5/q6 read from the gate pair ending there.
enum class SelectorKind {
    RSucceeded,
    RFailed,
    RPlus,
    RMinus,
    LastFailed,
    NegAge,
    RFailures,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
};

struct MetricSelector {
    SelectorKind kind = SelectorKind::RPlus;
    std::string arg;  // indicator name (q4) or situation id (q6)

    /// Accepts: r_succeeded r_failed r_plus r_minus last_failed neg_age
    /// r_failures q1 q2 q3 (alias mtbtf) q4:<indicator> q5 q6:<situation>.
    /// With rules_only, only the q-metrics are allowed.
    static MetricSelector parse(std::string_view text, bool rules_only = false);

    std::string str() const {
        switch (kind) {
            case SelectorKind::RSucceeded: return "r_succeeded";
            case SelectorKind::RFailed: return "r_failed";
            case SelectorKind::RPlus: return "r_plus";
            case SelectorKind::RMinus: return "r_minus";
            case SelectorKind::LastFailed: return "last_failed";
            case SelectorKind::NegAge: return "neg_age";
            case SelectorKind::RFailures: return "r_failures";
            case SelectorKind::Q1: return "q1";
            case SelectorKind::Q2: return "q2";
            case SelectorKind::Q3: return "q3";
            case SelectorKind::Q4: return "q4:" + arg;
            case SelectorKind::Q5: return "q5";
            case SelectorKind::Q6: return "q6:" + arg;
        }
        return "?";
    }

    bool operator==(const MetricSelector&) const = default;
};

inline MetricSelector MetricSelector::parse(std::string_view text, bool rules_only) {
    const auto bad = [&](const std::string& why) {
        throw Error(ErrorCode::InvalidPolicy, "metric selector '" + std::string(text) + "': " + why,
                    std::string(text));
    };
    MetricSelector sel;
    if (text.starts_with("q4:")) {
        sel.kind = SelectorKind::Q4;
        sel.arg = std::string(text.substr(3));
        try {
            indicator_from_name(sel.arg);
        } catch (const Error&) {
            bad("unknown indicator '" + sel.arg + "'");
        }
        return sel;
    }
    if (text.starts_with("q6:")) {
        sel.kind = SelectorKind::Q6;
        sel.arg = std::string(text.substr(3));
        if (sel.arg.empty()) bad("situation id must be non-empty");
        return sel;
    }
    if (text == "q1") sel.kind = SelectorKind::Q1;
    else if (text == "q2") sel.kind = SelectorKind::Q2;
    else if (text == "q3" || text == "mtbtf") sel.kind = SelectorKind::Q3;
    else if (text == "q5") sel.kind = SelectorKind::Q5;
    else if (text == "q4") bad("q4 needs an indicator, e.g. q4:mccabe");
    else if (text == "q6") bad("q6 needs a situation id, e.g. q6:cutin");
    else if (rules_only) {
        bad("rules accept q1, q2, q3, q4:<indicator>, q5 or q6:<situation>");
    } else if (text == "r_succeeded") sel.kind = SelectorKind::RSucceeded;
    else if (text == "r_failed") sel.kind = SelectorKind::RFailed;
    else if (text == "r_plus") sel.kind = SelectorKind::RPlus;
    else if (text == "r_minus") sel.kind = SelectorKind::RMinus;
    else if (text == "last_failed") sel.kind = SelectorKind::LastFailed;
    else if (text == "neg_age") sel.kind = SelectorKind::NegAge;
    else if (text == "r_failures") sel.kind = SelectorKind::RFailures;
    else bad("unknown selector");
    return sel;
}

// ---------------------------------------------------------------------------
// Gate policy
// ---------------------------------------------------------------------------

enum class Comparator { Ge, Gt, Le, Lt };

inline const char* comparator_name(Comparator cmp) {
    switch (cmp) {
        case Comparator::Ge: return ">=";
        case Comparator::Gt: return ">";
        case Comparator::Le: return "<=";
        case Comparator::Lt: return "<";
    }
    return "?";
}

inline Comparator comparator_from_name(std::string_view name) {
    if (name == ">=") return Comparator::Ge;
    if (name == ">") return Comparator::Gt;
    if (name == "<=") return Comparator::Le;
    if (name == "<") return Comparator::Lt;
    throw Error(ErrorCode::InvalidPolicy,
                "comparator must be one of >=, >, <=, < (got '" + std::string(name) + "')");
}

inline bool satisfies(Comparator cmp, double value, double threshold) {
    switch (cmp) {
        case Comparator::Ge: return value >= threshold;
        case Comparator::Gt: return value > threshold;
        case Comparator::Le: return value <= threshold;
        case Comparator::Lt: return value < threshold;
    }
    return false;
}

enum class Severity { Warn, Fail };

inline const char* severity_name(Severity s) {
    return s == Severity::Warn ? "warn" : "fail";
}

/// How a rule treats a metric that has no value (error or out-of-range gate).
enum class UndefinedPolicy { Warn, Fail, Ignore };

inline const char* undefined_policy_name(UndefinedPolicy p) {
    switch (p) {
        case UndefinedPolicy::Warn: return "warn";
        case UndefinedPolicy::Fail: return "fail";
        case UndefinedPolicy::Ignore: return "ignore";
    }
    return "warn";
}

struct GateDef {
    std::string name;
    Revision revision = 1;

    bool operator==(const GateDef&) const = default;
};

struct Rule {
    MetricSelector metric;
    Comparator cmp = Comparator::Ge;
    double threshold = 0.0;
    Severity severity = Severity::Fail;

    std::string str() const {
        return metric.str() + " " + comparator_name(cmp) + " " + detail::fmt_number(threshold) +
               " (" + severity_name(severity) + ")";
    }

    bool operator==(const Rule&) const = default;
};

/// Gate revisions plus threshold rules. Rules are checked for every
/// consecutive gate pair of every artifact; q3 rules read the MTBTF at the
/// pair's later gate.
struct GatePolicy {
    std::vector<GateDef> gates;  // strictly increasing revisions
    std::vector<Rule> rules;
    UndefinedPolicy undefined = UndefinedPolicy::Warn;

    void validate() const {
        if (gates.empty()) {
            throw Error(ErrorCode::EmptyPolicy, "policy defines no gates");
        }
        Revision prev = 0;
        for (const GateDef& g : gates) {
            if (g.revision < 1 || g.revision <= prev) {
                throw Error(ErrorCode::InvalidPolicy,
                            "gate revisions must be strictly increasing and >= 1");
            }
            prev = g.revision;
        }
        for (const Rule& r : rules) {
            if (!std::isfinite(r.threshold)) {
                throw Error(ErrorCode::InvalidPolicy,
                            "rule '" + r.metric.str() + "': threshold must be finite");
            }
        }
    }

    std::vector<Revision> gate_revisions() const {
        std::vector<Revision> revisions;
        revisions.reserve(gates.size());
        for (const GateDef& g : gates) revisions.push_back(g.revision);
        return revisions;
    }

    const GateDef* gate_at(Revision revision) const {
        for (const GateDef& g : gates) {
            if (g.revision == revision) return &g;
        }
        return nullptr;
    }

    static GatePolicy from_json(const nlohmann::json& doc);
    static GatePolicy load(const std::string& path);
};

inline GatePolicy GatePolicy::from_json(const nlohmann::json& doc) {
    const auto bad = [](const std::string& why) {
        throw Error(ErrorCode::InvalidPolicy, "gate policy: " + why);
    };
    if (!doc.is_object()) bad("document must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "gates" && key != "rules" && key != "undefined") {
            bad("unknown key '" + key + "'");
        }
    }
    GatePolicy policy;
    if (!doc.contains("gates") || !doc.at("gates").is_array()) bad("gates array is required");
    for (const nlohmann::json& item : doc.at("gates")) {
        if (!item.is_object()) bad("each gate must be an object");
        for (const auto& [key, value] : item.items()) {
            if (key != "name" && key != "revision") bad("unknown gate key '" + key + "'");
        }
        if (!item.contains("revision") || !item.at("revision").is_number_integer() ||
            item.at("revision").get<std::int64_t>() < 1) {
            bad("each gate needs an integer revision >= 1");
        }
        GateDef gate;
        gate.revision = static_cast<Revision>(item.at("revision").get<std::int64_t>());
        if (item.contains("name")) {
            if (!item.at("name").is_string()) bad("gate name must be a string");
            gate.name = item.at("name").get<std::string>();
        }
        if (gate.name.empty()) gate.name = "gate-" + std::to_string(gate.revision);
        policy.gates.push_back(std::move(gate));
    }
    if (doc.contains("rules")) {
        if (!doc.at("rules").is_array()) bad("rules must be an array");
        for (const nlohmann::json& item : doc.at("rules")) {
            if (!item.is_object()) bad("each rule must be an object");
            for (const auto& [key, value] : item.items()) {
                if (key != "metric" && key != "cmp" && key != "threshold" && key != "severity") {
                    bad("unknown rule key '" + key + "'");
                }
            }
            if (!item.contains("metric") || !item.at("metric").is_string()) {
                bad("each rule needs a string metric selector");
            }
            if (!item.contains("cmp") || !item.at("cmp").is_string()) {
                bad("each rule needs a cmp of >=, >, <= or <");
            }
            if (!item.contains("threshold") || !item.at("threshold").is_number()) {
                bad("each rule needs a numeric threshold");
            }
            Rule rule;
            rule.metric = MetricSelector::parse(item.at("metric").get<std::string>(),
                                                /*rules_only=*/true);
            rule.cmp = comparator_from_name(item.at("cmp").get<std::string>());
            rule.threshold = item.at("threshold").get<double>();
            if (item.contains("severity")) {
                const std::string s = item.at("severity").get<std::string>();
                if (s == "warn") rule.severity = Severity::Warn;
                else if (s == "fail") rule.severity = Severity::Fail;
                else bad("severity must be warn or fail");
            }
            policy.rules.push_back(std::move(rule));
        }
    }
    if (doc.contains("undefined")) {
        const std::string u = doc.at("undefined").get<std::string>();
        if (u == "warn") policy.undefined = UndefinedPolicy::Warn;
        else if (u == "fail") policy.undefined = UndefinedPolicy::Fail;
        else if (u == "ignore") policy.undefined = UndefinedPolicy::Ignore;
        else bad("undefined must be warn, fail or ignore");
    }
    policy.validate();
    return policy;
}

inline GatePolicy GatePolicy::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open policy file '" + path + "'", path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "policy file '" + path + "': " + e.what(), path);
    }
    return from_json(doc);
}

// ---------------------------------------------------------------------------
// Gate verdicts
// ---------------------------------------------------------------------------

enum class RuleOutcome { Pass, Warn, Fail, Skipped };

inline const char* rule_outcome_name(RuleOutcome o) {
    switch (o) {
        case RuleOutcome::Pass: return "pass";
        case RuleOutcome::Warn: return "warn";
        case RuleOutcome::Fail: return "fail";
        case RuleOutcome::Skipped: return "skipped";
    }
    return "?";
}

enum class Overall { Pass, Warn, Fail };

inline const char* overall_name(Overall o) {
    switch (o) {
        case Overall::Pass: return "pass";
        case Overall::Warn: return "warn";
        case Overall::Fail: return "fail";
    }
    return "?";
}

struct RuleResult {
    Rule rule;
    RuleOutcome outcome = RuleOutcome::Pass;
    std::optional<double> value;  // absent when the metric was undefined
    bool metric_undefined = false;

    bool operator==(const RuleResult&) const = default;
};

struct GateVerdict {
    ArtifactId artifact;
    std::string gate_name;  // name of the pair's later gate
    Revision n1 = 0;
    Revision n2 = 0;
    bool out_of_range = false;  // artifact shorter than the gate pair
    std::vector<RuleResult> rules;
    Overall overall = Overall::Pass;

    bool operator==(const GateVerdict&) const = default;
};

namespace detail {

inline const MetricSlot* rule_slot(const MetricsReport& report, const GatePairFigures& pair,
                                   const MetricSelector& sel) {
    switch (sel.kind) {
        case SelectorKind::Q1: return &pair.q1;
        case SelectorKind::Q2: return &pair.q2;
        case SelectorKind::Q5: return &pair.q5;
        case SelectorKind::Q3: {
            const GateFigures* g = report.gate(pair.n2);
            return g ? &g->mtbtf : nullptr;
        }
        case SelectorKind::Q4: {
            const auto it = pair.q4.find(sel.arg);
            return it == pair.q4.end() ? nullptr : &it->second;
        }
        case SelectorKind::Q6: {
            const auto it = pair.q6.find(sel.arg);
            return it == pair.q6.end() ? nullptr : &it->second;
        }
        default: return nullptr;
    }
}

inline RuleOutcome undefined_outcome(UndefinedPolicy policy) {
    switch (policy) {
        case UndefinedPolicy::Warn: return RuleOutcome::Warn;
        case UndefinedPolicy::Fail: return RuleOutcome::Fail;
        case UndefinedPolicy::Ignore: return RuleOutcome::Skipped;
    }
    return RuleOutcome::Warn;
}

inline Overall combine(const std::vector<RuleResult>& rules) {
    Overall overall = Overall::Pass;
    for (const RuleResult& r : rules) {
        if (r.outcome == RuleOutcome::Fail) return Overall::Fail;
        if (r.outcome == RuleOutcome::Warn) overall = Overall::Warn;
    }
    return overall;
}

}  // namespace detail

/// One verdict per artifact per consecutive policy gate pair, in artifact
/// then gate order. Reports must have been computed over the policy's gates
/// (clipped per artifact); a missing pair marks the verdict out-of-range and
/// every rule follows the policy's undefined handling.
inline std::vector<GateVerdict> evaluate_gates(std::span<const MetricsReport> reports,
                                               const GatePolicy& policy) {
    policy.validate();
    std::vector<GateVerdict> verdicts;
    for (const MetricsReport& report : reports) {
        for (std::size_t k = 0; k + 1 < policy.gates.size(); ++k) {
            const GateDef& g1 = policy.gates[k];
            const GateDef& g2 = policy.gates[k + 1];
            GateVerdict verdict{report.artifact, g2.name, g1.revision, g2.revision,
                                false,           {},      Overall::Pass};
            const GatePairFigures* pair = report.pair_ending_at(g2.revision);
            if (pair == nullptr || pair->n1 != g1.revision) {
                verdict.out_of_range = true;
                for (const Rule& rule : policy.rules) {
                    verdict.rules.push_back(RuleResult{
                        rule, detail::undefined_outcome(policy.undefined), std::nullopt, true});
                }
            } else {
                for (const Rule& rule : policy.rules) {
                    const MetricSlot* slot = detail::rule_slot(report, *pair, rule.metric);
                    RuleResult result{rule, RuleOutcome::Pass, std::nullopt, false};
                    if (slot == nullptr || !slot->defined()) {
                        result.outcome = detail::undefined_outcome(policy.undefined);
                        result.metric_undefined = true;
                    } else {
                        result.value = slot->value;
                        result.outcome = satisfies(rule.cmp, *slot->value, rule.threshold)
                                             ? RuleOutcome::Pass
                                             : (rule.severity == Severity::Fail ? RuleOutcome::Fail
                                                                                : RuleOutcome::Warn);
                    }
                    verdict.rules.push_back(std::move(result));
                }
            }
            verdict.overall = detail::combine(verdict.rules);
            verdicts.push_back(std::move(verdict));
        }
    }
    return verdicts;
}

struct PolicyRun {
    std::vector<MetricsReport> reports;
    std::vector<GateVerdict> verdicts;

    bool any_fail() const {
        return std::any_of(verdicts.begin(), verdicts.end(),
                           [](const GateVerdict& v) { return v.overall == Overall::Fail; });
    }
};

/// Computes reports over the policy's gate list (clipped to each artifact's
/// length, so short artifacts yield out-of-range verdicts instead of errors)
/// and evaluates every rule.
inline PolicyRun run_gate_policy(const HistorySet& set, const GatePolicy& policy,
                                 VarianceMode variance_mode = VarianceMode::PassesOnly,
                                 unsigned threads = 1) {
    policy.validate();
    ComputeOptions options;
    options.variance_mode = variance_mode;
    for (const Rule& rule : policy.rules) {
        if (rule.metric.kind == SelectorKind::Q4) options.indicators.push_back(rule.metric.arg);
        if (rule.metric.kind == SelectorKind::Q6) options.situations.push_back(rule.metric.arg);
    }
    const auto dedup = [](std::vector<std::string>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedup(options.indicators);
    dedup(options.situations);

    const std::vector<Revision> all_gates = policy.gate_revisions();
    std::vector<const ArtifactHistory*> histories;
    histories.reserve(set.size());
    for (const auto& [id, h] : set) histories.push_back(&h);

    PolicyRun run;
    std::vector<std::optional<MetricsReport>> slots(histories.size());
    detail::parallel_for(histories.size(), threads, [&](std::size_t i) {
        const ArtifactHistory& h = *histories[i];
        std::vector<Revision> gates;
        for (Revision g : all_gates) {
            if (g <= h.size()) gates.push_back(g);
        }
        if (gates.empty()) {
            slots[i] = MetricsReport{h.artifact(), {}, {}};
        } else {
            slots[i] = compute_report(h, gates, options);
        }
    });
    run.reports.reserve(slots.size());
    for (std::optional<MetricsReport>& slot : slots) run.reports.push_back(std::move(*slot));
    run.verdicts = evaluate_gates(run.reports, policy);
    return run;
}

// ---------------------------------------------------------------------------
// Heatmap
// ---------------------------------------------------------------------------

struct HeatmapCell {
    std::optional<double> raw;
    std::optional<double> normalized;  // min-max within the column, in [0, 1]

    bool operator==(const HeatmapCell&) const = default;
};

struct HeatmapMatrix {
    std::vector<ArtifactId> artifacts;
    std::vector<MetricSelector> selectors;
    std::vector<std::vector<HeatmapCell>> cells;  // [artifact][selector]

    bool operator==(const HeatmapMatrix&) const = default;
};

namespace detail {

inline std::optional<double> selector_raw(const MetricsReport& report, const MetricSelector& sel,
                                          Revision gate) {
    const GateFigures* g = report.gate(gate);
    const auto slot_value = [](const MetricSlot* slot) -> std::optional<double> {
        return slot != nullptr && slot->defined() ? slot->value : std::nullopt;
    };
    switch (sel.kind) {
        case SelectorKind::RSucceeded:
            return g ? std::optional(static_cast<double>(g->r_succeeded)) : std::nullopt;
        case SelectorKind::RFailed:
            return g ? std::optional(static_cast<double>(g->r_failed)) : std::nullopt;
        case SelectorKind::RPlus: return g ? std::optional(g->r_plus) : std::nullopt;
        case SelectorKind::RMinus: return g ? std::optional(g->r_minus) : std::nullopt;
        case SelectorKind::LastFailed:
            return g ? std::optional(static_cast<double>(g->last_failed)) : std::nullopt;
        case SelectorKind::NegAge:
            return g ? std::optional(static_cast<double>(g->neg_age)) : std::nullopt;
        case SelectorKind::RFailures:
            return g ? std::optional(static_cast<double>(g->r_failures)) : std::nullopt;
        case SelectorKind::Q3: return slot_value(g ? &g->mtbtf : nullptr);
        default: break;
    }
    const GatePairFigures* pair = report.pair_ending_at(gate);
    if (pair == nullptr) return std::nullopt;
    switch (sel.kind) {
        case SelectorKind::Q1: return slot_value(&pair->q1);
        case SelectorKind::Q2: return slot_value(&pair->q2);
        case SelectorKind::Q5: return slot_value(&pair->q5);
        case SelectorKind::Q4: {
            const auto it = pair->q4.find(sel.arg);
            return slot_value(it == pair->q4.end() ? nullptr : &it->second);
        }
        case SelectorKind::Q6: {
            const auto it = pair->q6.find(sel.arg);
            return slot_value(it == pair->q6.end() ? nullptr : &it->second);
        }
        default: return std::nullopt;
    }
}

}  // namespace detail

/// Raw values per (artifact, selector) at one gate, min-max normalized per
/// column over the defined cells. A column whose defined values are all equal
/// normalizes to 0.5. Cells without a value stay undefined.
inline HeatmapMatrix build_heatmap(std::span<const MetricsReport> reports,
                                   std::span<const MetricSelector> selectors, Revision gate) {
    if (reports.empty()) throw Error(ErrorCode::NoArtifacts, "heatmap needs at least one artifact");
    if (selectors.empty()) throw Error(ErrorCode::NoSelectors, "heatmap needs at least one metric");
    HeatmapMatrix matrix;
    matrix.selectors.assign(selectors.begin(), selectors.end());
    matrix.cells.resize(reports.size(), std::vector<HeatmapCell>(selectors.size()));
    for (std::size_t row = 0; row < reports.size(); ++row) {
        matrix.artifacts.push_back(reports[row].artifact);
        for (std::size_t col = 0; col < selectors.size(); ++col) {
            matrix.cells[row][col].raw = detail::selector_raw(reports[row], selectors[col], gate);
        }
    }
    for (std::size_t col = 0; col < selectors.size(); ++col) {
        double lo = 0.0;
        double hi = 0.0;
        bool any = false;
        for (std::size_t row = 0; row < reports.size(); ++row) {
            const auto& raw = matrix.cells[row][col].raw;
            if (!raw) continue;
            lo = any ? std::min(lo, *raw) : *raw;
            hi = any ? std::max(hi, *raw) : *raw;
            any = true;
        }
        if (!any) continue;
        for (std::size_t row = 0; row < reports.size(); ++row) {
            HeatmapCell& cell = matrix.cells[row][col];
            if (!cell.raw) continue;
            cell.normalized = hi > lo ? (*cell.raw - lo) / (hi - lo) : 0.5;
        }
    }
    return matrix;
}

/// Header, one normalized row per artifact (6 decimal places, empty cell when
/// undefined), then the same rows with raw values under a `# raw` line.
inline std::string render_heatmap_csv(const HeatmapMatrix& matrix) {
    std::ostringstream out;
    out << "artifact";
    for (const MetricSelector& sel : matrix.selectors) out << ',' << detail::csv_field(sel.str());
    out << '\n';
    for (std::size_t row = 0; row < matrix.artifacts.size(); ++row) {
        out << detail::csv_field(matrix.artifacts[row].str());
        for (const HeatmapCell& cell : matrix.cells[row]) {
            out << ',';
            if (cell.normalized) out << detail::fmt_fixed6(*cell.normalized);
        }
        out << '\n';
    }
    out << "# raw\n";
    for (std::size_t row = 0; row < matrix.artifacts.size(); ++row) {
        out << detail::csv_field(matrix.artifacts[row].str());
        for (const HeatmapCell& cell : matrix.cells[row]) {
            out << ',';
            if (cell.raw) out << detail::fmt_number(*cell.raw);
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

struct RenderOptions {
    std::string stamp;  // emitted only when non-empty; keeps output reproducible
};

namespace detail {

inline nlohmann::ordered_json slot_to_json(const MetricSlot& slot) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    if (slot.defined()) {
        j["value"] = *slot.value;
        if (slot.verdict) j["verdict"] = verdict_name(*slot.verdict);
        return j;
    }
    j["verdict"] = verdict_name(Verdict::Undefined);
    if (slot.error) j["error"] = error_code_name(*slot.error);
    if (!slot.detail.empty()) j["detail"] = slot.detail;
    return j;
}

inline MetricSlot slot_from_json(const nlohmann::json& j) {
    MetricSlot slot;
    if (j.contains("value")) slot.value = j.at("value").get<double>();
    if (j.contains("verdict")) {
        const std::string name = j.at("verdict").get<std::string>();
        if (name == "improved") slot.verdict = Verdict::Improved;
        else if (name == "not_decreased") slot.verdict = Verdict::NotDecreased;
        else if (name == "decreased") slot.verdict = Verdict::Decreased;
        else if (name == "undefined") slot.verdict = Verdict::Undefined;
        else throw Error(ErrorCode::SchemaViolation, "unknown verdict '" + name + "'");
    }
    if (j.contains("error")) slot.error = error_code_from_name(j.at("error").get<std::string>());
    if (j.contains("detail")) slot.detail = j.at("detail").get<std::string>();
    return slot;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(std::span<const MetricsReport> reports,
                                             std::span<const GateVerdict> verdicts,
                                             const RenderOptions& options = {}) {
    nlohmann::ordered_json doc;
    doc["schema"] = "metametrics/1";
    if (!options.stamp.empty()) doc["generated_at"] = options.stamp;
    nlohmann::ordered_json artifacts = nlohmann::ordered_json::array();
    for (const MetricsReport& report : reports) {
        nlohmann::ordered_json a;
        a["artifact"] = report.artifact.str();
        nlohmann::ordered_json gates = nlohmann::ordered_json::array();
        for (const GateFigures& g : report.gates) {
            nlohmann::ordered_json jg;
            jg["gate"] = g.gate;
            jg["r_succeeded"] = g.r_succeeded;
            jg["r_failed"] = g.r_failed;
            jg["r_plus"] = g.r_plus;
            jg["r_minus"] = g.r_minus;
            jg["last_failed"] = g.last_failed;
            jg["neg_age"] = g.neg_age;
            jg["r_failures"] = g.r_failures;
            jg["mtbtf"] = detail::slot_to_json(g.mtbtf);
            gates.push_back(std::move(jg));
        }
        a["gates"] = std::move(gates);
        nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
        for (const GatePairFigures& p : report.pairs) {
            nlohmann::ordered_json jp;
            jp["n1"] = p.n1;
            jp["n2"] = p.n2;
            jp["q1"] = detail::slot_to_json(p.q1);
            jp["q2"] = detail::slot_to_json(p.q2);
            nlohmann::ordered_json q4 = nlohmann::ordered_json::object();
            for (const auto& [name, slot] : p.q4) q4[name] = detail::slot_to_json(slot);
            jp["q4"] = std::move(q4);
            jp["q5"] = detail::slot_to_json(p.q5);
            nlohmann::ordered_json q6 = nlohmann::ordered_json::object();
            for (const auto& [name, slot] : p.q6) q6[name] = detail::slot_to_json(slot);
            jp["q6"] = std::move(q6);
            pairs.push_back(std::move(jp));
        }
        a["pairs"] = std::move(pairs);
        artifacts.push_back(std::move(a));
    }
    doc["artifacts"] = std::move(artifacts);
    nlohmann::ordered_json jverdicts = nlohmann::ordered_json::array();
    for (const GateVerdict& v : verdicts) {
        nlohmann::ordered_json jv;
        jv["artifact"] = v.artifact.str();
        jv["gate"] = v.gate_name;
        jv["n1"] = v.n1;
        jv["n2"] = v.n2;
        jv["out_of_range"] = v.out_of_range;
        jv["overall"] = overall_name(v.overall);
        nlohmann::ordered_json rules = nlohmann::ordered_json::array();
        for (const RuleResult& r : v.rules) {
            nlohmann::ordered_json jr;
            jr["metric"] = r.rule.metric.str();
            jr["cmp"] = comparator_name(r.rule.cmp);
            jr["threshold"] = r.rule.threshold;
            jr["severity"] = severity_name(r.rule.severity);
            jr["outcome"] = rule_outcome_name(r.outcome);
            jr["undefined"] = r.metric_undefined;
            if (r.value) jr["value"] = *r.value;
            rules.push_back(std::move(jr));
        }
        jv["rules"] = std::move(rules);
        jverdicts.push_back(std::move(jv));
    }
    doc["verdicts"] = std::move(jverdicts);
    return doc;
}

inline std::string render_report_json(std::span<const MetricsReport> reports,
                                      std::span<const GateVerdict> verdicts,
                                      const RenderOptions& options = {}) {
    return report_to_json(reports, verdicts, options).dump(2) + "\n";
}

/// Parses the "artifacts" section of a report document back into reports.
inline std::vector<MetricsReport> reports_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("schema") ||
        doc.at("schema").get<std::string>() != "metametrics/1") {
        throw Error(ErrorCode::SchemaViolation, "not a metametrics/1 report document");
    }
    std::vector<MetricsReport> reports;
    for (const nlohmann::json& a : doc.at("artifacts")) {
        MetricsReport report{ArtifactId(a.at("artifact").get<std::string>()), {}, {}};
        for (const nlohmann::json& jg : a.at("gates")) {
            GateFigures g;
            g.gate = jg.at("gate").get<Revision>();
            g.r_succeeded = jg.at("r_succeeded").get<std::uint64_t>();
            g.r_failed = jg.at("r_failed").get<std::uint64_t>();
            g.r_plus = jg.at("r_plus").get<double>();
            g.r_minus = jg.at("r_minus").get<double>();
            g.last_failed = jg.at("last_failed").get<Revision>();
            g.neg_age = jg.at("neg_age").get<Revision>();
            g.r_failures = jg.at("r_failures").get<std::uint64_t>();
            g.mtbtf = detail::slot_from_json(jg.at("mtbtf"));
            report.gates.push_back(std::move(g));
        }
        for (const nlohmann::json& jp : a.at("pairs")) {
            GatePairFigures p;
            p.n1 = jp.at("n1").get<Revision>();
            p.n2 = jp.at("n2").get<Revision>();
            p.q1 = detail::slot_from_json(jp.at("q1"));
            p.q2 = detail::slot_from_json(jp.at("q2"));
            p.q5 = detail::slot_from_json(jp.at("q5"));
            for (const auto& [name, slot] : jp.at("q4").items()) {
                p.q4[name] = detail::slot_from_json(slot);
            }
            for (const auto& [name, slot] : jp.at("q6").items()) {
                p.q6[name] = detail::slot_from_json(slot);
            }
            report.pairs.push_back(std::move(p));
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

/// Parses the "verdicts" section back. Together with reports_from_json this
/// round-trips everything report_to_json emits.
inline std::vector<GateVerdict> verdicts_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("schema") ||
        doc.at("schema").get<std::string>() != "metametrics/1") {
        throw Error(ErrorCode::SchemaViolation, "not a metametrics/1 report document");
    }
    std::vector<GateVerdict> verdicts;
    for (const nlohmann::json& jv : doc.at("verdicts")) {
        GateVerdict v{ArtifactId(jv.at("artifact").get<std::string>()),
                      jv.at("gate").get<std::string>(),
                      jv.at("n1").get<Revision>(),
                      jv.at("n2").get<Revision>(),
                      jv.at("out_of_range").get<bool>(),
                      {},
                      Overall::Pass};
        const std::string overall = jv.at("overall").get<std::string>();
        if (overall == "pass") v.overall = Overall::Pass;
        else if (overall == "warn") v.overall = Overall::Warn;
        else if (overall == "fail") v.overall = Overall::Fail;
        else throw Error(ErrorCode::SchemaViolation, "unknown overall '" + overall + "'");
        for (const nlohmann::json& jr : jv.at("rules")) {
            RuleResult r;
            r.rule.metric = MetricSelector::parse(jr.at("metric").get<std::string>(), true);
            r.rule.cmp = comparator_from_name(jr.at("cmp").get<std::string>());
            r.rule.threshold = jr.at("threshold").get<double>();
            const std::string severity = jr.at("severity").get<std::string>();
            if (severity == "warn") r.rule.severity = Severity::Warn;
            else if (severity == "fail") r.rule.severity = Severity::Fail;
            else throw Error(ErrorCode::SchemaViolation, "unknown severity '" + severity + "'");
            const std::string outcome = jr.at("outcome").get<std::string>();
            if (outcome == "pass") r.outcome = RuleOutcome::Pass;
            else if (outcome == "warn") r.outcome = RuleOutcome::Warn;
            else if (outcome == "fail") r.outcome = RuleOutcome::Fail;
            else if (outcome == "skipped") r.outcome = RuleOutcome::Skipped;
            else throw Error(ErrorCode::SchemaViolation, "unknown outcome '" + outcome + "'");
            r.metric_undefined = jr.at("undefined").get<bool>();
            if (jr.contains("value")) r.value = jr.at("value").get<double>();
            v.rules.push_back(std::move(r));
        }
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

namespace detail {

inline std::string md_slot(const MetricSlot& slot) {
    if (slot.defined()) return fmt_g6(*slot.value);
    if (slot.error) return std::string("undefined (") + error_code_name(*slot.error) + ")";
    return "undefined";
}

inline std::string md_badge(Overall overall) {
    switch (overall) {
        case Overall::Pass: return "**PASS**";
        case Overall::Warn: return "**WARN**";
        case Overall::Fail: return "**FAIL**";
    }
    return "**?**";
}

}  // namespace detail

/// One section per artifact: a gate-figure table, one table per gate pair,
/// and the verdicts for that artifact. Deterministic for equal inputs.
inline std::string render_report_markdown(std::span<const MetricsReport> reports,
                                          std::span<const GateVerdict> verdicts,
                                          const RenderOptions& options = {}) {
    using detail::md_escape;
    std::ostringstream out;
    out << "# Quality metrics report\n";
    if (!options.stamp.empty()) out << "\nGenerated: " << options.stamp << "\n";
    for (const MetricsReport& report : reports) {
        out << "\n## " << md_escape(report.artifact.str()) << "\n";
        if (!report.gates.empty()) {
            out << "\n### Gate figures\n\n| figure |";
            for (const GateFigures& g : report.gates) out << " gate " << g.gate << " |";
            out << "\n| --- |";
            for (std::size_t i = 0; i < report.gates.size(); ++i) out << " ---: |";
            out << "\n";
            const auto row = [&](const char* label, auto getter) {
                out << "| " << label << " |";
                for (const GateFigures& g : report.gates) out << " " << getter(g) << " |";
                out << "\n";
            };
            row("r_succeeded", [](const GateFigures& g) { return std::to_string(g.r_succeeded); });
            row("r_failed", [](const GateFigures& g) { return std::to_string(g.r_failed); });
            row("r_plus", [](const GateFigures& g) { return detail::fmt_g6(g.r_plus); });
            row("r_minus", [](const GateFigures& g) { return detail::fmt_g6(g.r_minus); });
            row("last_failed", [](const GateFigures& g) { return std::to_string(g.last_failed); });
            row("neg_age", [](const GateFigures& g) { return std::to_string(g.neg_age); });
            row("r_failures", [](const GateFigures& g) { return std::to_string(g.r_failures); });
            row("mtbtf", [](const GateFigures& g) { return detail::md_slot(g.mtbtf); });
        }
        for (const GatePairFigures& p : report.pairs) {
            out << "\n### Gates " << p.n1 << " to " << p.n2 << "\n\n";
            out << "| metric | value | verdict |\n| --- | ---: | --- |\n";
            const auto row = [&](const std::string& label, const MetricSlot& slot) {
                out << "| " << md_escape(label) << " | " << detail::md_slot(slot) << " | "
                    << (slot.verdict ? verdict_name(*slot.verdict) : "none") << " |\n";
            };
            row("q1", p.q1);
            row("q2", p.q2);
            for (const auto& [name, slot] : p.q4) row("q4:" + name, slot);
            row("q5", p.q5);
            for (const auto& [name, slot] : p.q6) row("q6:" + name, slot);
        }
        bool artifact_has_verdicts = false;
        for (const GateVerdict& v : verdicts) {
            if (v.artifact != report.artifact) continue;
            if (!artifact_has_verdicts) {
                out << "\n### Gate verdicts\n";
                artifact_has_verdicts = true;
            }
            out << "\n" << detail::md_badge(v.overall) << " " << md_escape(v.gate_name) << " ("
                << v.n1 << " to " << v.n2 << ")";
            if (v.out_of_range) out << " - gate pair beyond this artifact's history";
            out << "\n";
            if (!v.rules.empty()) {
                out << "\n| rule | value | outcome |\n| --- | ---: | --- |\n";
                for (const RuleResult& r : v.rules) {
                    out << "| " << md_escape(r.rule.str()) << " | "
                        << (r.value ? detail::fmt_g6(*r.value) : "undefined") << " | "
                        << rule_outcome_name(r.outcome) << " |\n";
                }
            }
        }
    }
    return out.str();
}

enum class ReportFormat { Json, Markdown };

inline std::string render_report(std::span<const MetricsReport> reports,
                                 std::span<const GateVerdict> verdicts, ReportFormat format,
                                 const RenderOptions& options = {}) {
    return format == ReportFormat::Json ? render_report_json(reports, verdicts, options)
                                        : render_report_markdown(reports, verdicts, options);
}

}  // namespace metametrics

#endif  // METAMETRICS_REPORT_HPP
