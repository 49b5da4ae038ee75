// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded synthetic-history generation. The stochastic process is pinned down
// to the bit: a SplitMix64 stream drives all draws (see README for the exact
// draw order), so the same config and seed reproduce the same HistorySet on
// every platform.

#ifndef METAMETRICS_SYNTH_HPP
#define METAMETRICS_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "metametrics/error.hpp"
#include "metametrics/history.hpp"

namespace metametrics::synth {

/// SplitMix64: state advances by the 64-bit golden-ratio constant, output is
/// the finalized state. Small, portable, and easy to re-implement elsewhere.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [-1, 1).
    double next_symmetric() { return 2.0 * next_double() - 1.0; }

private:
    std::uint64_t state_;
};

enum class InjectionKind { FailureRate, DurationDrift, ActingVariance, IndicatorSpike };

inline const char* injection_kind_name(InjectionKind kind) {
    switch (kind) {
        case InjectionKind::FailureRate: return "failure-rate";
        case InjectionKind::DurationDrift: return "duration-drift";
        case InjectionKind::ActingVariance: return "acting-variance";
        case InjectionKind::IndicatorSpike: return "indicator-spike";
    }
    return "?";
}

/// A regression injected into the stochastic process from start_revision on:
///   failure-rate:    failure probability scaled by (1 + magnitude)
///   duration-drift:  duration mean scaled by (1 + magnitude)
///   acting-variance: acting jitter scaled by magnitude
///   indicator-spike: misra/mccabe/uncovered levels scaled by (1 + magnitude)
struct Injection {
    Revision start_revision = 1;
    InjectionKind kind = InjectionKind::FailureRate;
    double magnitude = 0.0;
};

struct SituationSpec {
    std::string id;
    double mean_s = 1.0;
    double jitter_s = 0.0;
};

struct GeneratorConfig {
    std::uint32_t artifact_count = 1;
    Revision revisions_per_artifact = 100;
    double pass_probability = 0.5;

    // Indicator processes: value(i) = base + drift * (i - 1), clamped to the
    // field's valid range after rounding. sloc never spikes.
    double sloc_base = 1000.0;
    double sloc_growth = 0.0;
    double misra_base = 0.0;
    double misra_drift = 0.0;
    double mccabe_base = 1.0;
    double mccabe_drift = 0.0;
    double uncovered_base = 0.0;
    double uncovered_drift = 0.0;

    double duration_mean_s = 1.0;
    double duration_jitter_s = 0.0;

    std::vector<SituationSpec> situations;
    std::vector<Injection> injections;

    std::uint64_t seed = 0;

    void validate() const;
    static GeneratorConfig from_json(const nlohmann::json& doc);
    static GeneratorConfig load(const std::string& path);
};

inline void GeneratorConfig::validate() const {
    const auto fail = [](const std::string& field, const std::string& why) {
        throw Error(ErrorCode::InvalidConfig, "generator config: " + field + " " + why, field);
    };
    if (artifact_count < 1 || artifact_count > 10000) fail("artifact_count", "must be in 1..10000");
    if (revisions_per_artifact < 1) fail("revisions_per_artifact", "must be >= 1");
    if (!(pass_probability >= 0.0 && pass_probability <= 1.0)) {
        fail("pass_probability", "must be in [0, 1]");
    }
    if (!(sloc_base >= 1.0)) fail("sloc_base", "must be >= 1");
    if (!std::isfinite(sloc_growth)) fail("sloc_growth", "must be finite");
    if (!(misra_base >= 0.0)) fail("misra_base", "must be >= 0");
    if (!std::isfinite(misra_drift)) fail("misra_drift", "must be finite");
    if (!(mccabe_base >= 1.0)) fail("mccabe_base", "must be >= 1");
    if (!std::isfinite(mccabe_drift)) fail("mccabe_drift", "must be finite");
    if (!(uncovered_base >= 0.0)) fail("uncovered_base", "must be >= 0");
    if (!std::isfinite(uncovered_drift)) fail("uncovered_drift", "must be finite");
    if (!(duration_mean_s >= 0.0)) fail("duration_mean_s", "must be >= 0");
    if (!(duration_jitter_s >= 0.0)) fail("duration_jitter_s", "must be >= 0");
    for (const SituationSpec& s : situations) {
        if (s.id.empty()) fail("situations", "situation id must be non-empty");
        if (!(s.mean_s >= 0.0)) fail("situations", "mean_s must be >= 0 ('" + s.id + "')");
        if (!(s.jitter_s >= 0.0)) fail("situations", "jitter_s must be >= 0 ('" + s.id + "')");
    }
    for (std::size_t k = 0; k < situations.size(); ++k) {
        for (std::size_t j = k + 1; j < situations.size(); ++j) {
            if (situations[k].id == situations[j].id) {
                fail("situations", "duplicate situation id '" + situations[k].id + "'");
            }
        }
    }
    for (const Injection& inj : injections) {
        if (inj.start_revision < 1) fail("injections", "start_revision must be >= 1");
        if (!std::isfinite(inj.magnitude)) fail("injections", "magnitude must be finite");
        switch (inj.kind) {
            case InjectionKind::FailureRate:
                if (inj.magnitude < 0.0) fail("injections", "failure-rate magnitude must be >= 0");
                break;
            case InjectionKind::DurationDrift:
            case InjectionKind::IndicatorSpike:
                if (inj.magnitude < -1.0) fail("injections", "magnitude must be >= -1");
                break;
            case InjectionKind::ActingVariance:
                if (!(inj.magnitude > 0.0)) fail("injections", "acting-variance magnitude must be > 0");
                break;
        }
    }
}

namespace detail {

inline InjectionKind injection_kind_from_name(const std::string& name) {
    if (name == "failure-rate") return InjectionKind::FailureRate;
    if (name == "duration-drift") return InjectionKind::DurationDrift;
    if (name == "acting-variance") return InjectionKind::ActingVariance;
    if (name == "indicator-spike") return InjectionKind::IndicatorSpike;
    throw Error(ErrorCode::InvalidConfig, "generator config: unknown injection kind '" + name + "'",
                "injections");
}

template <typename T>
T config_number(const nlohmann::json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    const nlohmann::json& v = doc.at(key);
    if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string("generator config: ") + key + " must be a number", key);
        }
    } else {
        if (!v.is_number_integer()) {
            throw Error(ErrorCode::InvalidConfig,
                        std::string("generator config: ") + key + " must be an integer", key);
        }
    }
    return v.get<T>();
}

}  // namespace detail

inline GeneratorConfig GeneratorConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open generator config '" + path + "'", path);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "generator config '" + path + "': " + e.what(), path);
    }
    return from_json(doc);
}

inline GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& doc) {
    static const char* known[] = {
        "artifact_count", "revisions_per_artifact", "pass_probability",
        "sloc_base", "sloc_growth", "misra_base", "misra_drift",
        "mccabe_base", "mccabe_drift", "uncovered_base", "uncovered_drift",
        "duration_mean_s", "duration_jitter_s", "situations", "injections", "seed"};
    if (!doc.is_object()) {
        throw Error(ErrorCode::InvalidConfig, "generator config must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) {
            throw Error(ErrorCode::InvalidConfig, "generator config: unknown key '" + key + "'", key);
        }
    }
    GeneratorConfig cfg;
    cfg.artifact_count = detail::config_number<std::uint32_t>(doc, "artifact_count", cfg.artifact_count);
    cfg.revisions_per_artifact =
        detail::config_number<Revision>(doc, "revisions_per_artifact", cfg.revisions_per_artifact);
    cfg.pass_probability = detail::config_number<double>(doc, "pass_probability", cfg.pass_probability);
    cfg.sloc_base = detail::config_number<double>(doc, "sloc_base", cfg.sloc_base);
    cfg.sloc_growth = detail::config_number<double>(doc, "sloc_growth", cfg.sloc_growth);
    cfg.misra_base = detail::config_number<double>(doc, "misra_base", cfg.misra_base);
    cfg.misra_drift = detail::config_number<double>(doc, "misra_drift", cfg.misra_drift);
    cfg.mccabe_base = detail::config_number<double>(doc, "mccabe_base", cfg.mccabe_base);
    cfg.mccabe_drift = detail::config_number<double>(doc, "mccabe_drift", cfg.mccabe_drift);
    cfg.uncovered_base = detail::config_number<double>(doc, "uncovered_base", cfg.uncovered_base);
    cfg.uncovered_drift = detail::config_number<double>(doc, "uncovered_drift", cfg.uncovered_drift);
    cfg.duration_mean_s = detail::config_number<double>(doc, "duration_mean_s", cfg.duration_mean_s);
    cfg.duration_jitter_s =
        detail::config_number<double>(doc, "duration_jitter_s", cfg.duration_jitter_s);
    if (doc.contains("situations")) {
        if (!doc.at("situations").is_array()) {
            throw Error(ErrorCode::InvalidConfig, "generator config: situations must be an array",
                        "situations");
        }
        for (const nlohmann::json& item : doc.at("situations")) {
            if (!item.is_object() || !item.contains("id") || !item.at("id").is_string()) {
                throw Error(ErrorCode::InvalidConfig,
                            "generator config: each situation needs a string id", "situations");
            }
            SituationSpec spec;
            spec.id = item.at("id").get<std::string>();
            spec.mean_s = detail::config_number<double>(item, "mean_s", spec.mean_s);
            spec.jitter_s = detail::config_number<double>(item, "jitter_s", spec.jitter_s);
            cfg.situations.push_back(std::move(spec));
        }
    }
    if (doc.contains("injections")) {
        if (!doc.at("injections").is_array()) {
            throw Error(ErrorCode::InvalidConfig, "generator config: injections must be an array",
                        "injections");
        }
        for (const nlohmann::json& item : doc.at("injections")) {
            if (!item.is_object() || !item.contains("kind") || !item.at("kind").is_string()) {
                throw Error(ErrorCode::InvalidConfig,
                            "generator config: each injection needs a string kind", "injections");
            }
            Injection inj;
            inj.start_revision = detail::config_number<Revision>(item, "start_revision", 1);
            inj.kind = detail::injection_kind_from_name(item.at("kind").get<std::string>());
            inj.magnitude = detail::config_number<double>(item, "magnitude", 0.0);
            cfg.injections.push_back(inj);
        }
    }
    cfg.seed = detail::config_number<std::uint64_t>(doc, "seed", cfg.seed);
    cfg.validate();
    return cfg;
}

namespace detail {

inline std::int64_t clamped_round(double value, std::int64_t lo) {
    const auto rounded = static_cast<std::int64_t>(std::llround(value));
    return rounded < lo ? lo : rounded;
}

inline std::string artifact_name(std::uint32_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "art-%04u", index);
    return buf;
}

}  // namespace detail

/// Generates one artifact per sub-seed. Draw order per revision: outcome,
/// then (passing revisions only) duration, then one acting draw per situation
/// in config order. Indicator values are deterministic in i.
inline HistorySet generate(const GeneratorConfig& cfg) {
    cfg.validate();
    SplitMix64 master(cfg.seed);
    std::vector<std::uint64_t> sub_seeds(cfg.artifact_count);
    for (std::uint64_t& s : sub_seeds) s = master.next();

    HistorySet set;
    for (std::uint32_t k = 0; k < cfg.artifact_count; ++k) {
        SplitMix64 rng(sub_seeds[k]);
        const ArtifactId id{detail::artifact_name(k)};
        std::vector<RevisionRecord> records;
        records.reserve(cfg.revisions_per_artifact);
        for (Revision i = 1; i <= cfg.revisions_per_artifact; ++i) {
            double fail_scale = 1.0;
            double duration_scale = 1.0;
            double jitter_scale = 1.0;
            double indicator_scale = 1.0;
            for (const Injection& inj : cfg.injections) {
                if (i < inj.start_revision) continue;
                switch (inj.kind) {
                    case InjectionKind::FailureRate: fail_scale *= 1.0 + inj.magnitude; break;
                    case InjectionKind::DurationDrift: duration_scale *= 1.0 + inj.magnitude; break;
                    case InjectionKind::ActingVariance: jitter_scale *= inj.magnitude; break;
                    case InjectionKind::IndicatorSpike: indicator_scale *= 1.0 + inj.magnitude; break;
                }
            }
            double fail_p = (1.0 - cfg.pass_probability) * fail_scale;
            if (fail_p > 1.0) fail_p = 1.0;
            const double pass_p = 1.0 - fail_p;

            const bool pass = rng.next_double() < pass_p;

            IndicatorSample ind;
            const double step = static_cast<double>(i - 1);
            ind.sloc = detail::clamped_round(cfg.sloc_base + cfg.sloc_growth * step, 1);
            ind.misra_warnings = detail::clamped_round(
                (cfg.misra_base + cfg.misra_drift * step) * indicator_scale, 0);
            ind.mccabe = detail::clamped_round(
                (cfg.mccabe_base + cfg.mccabe_drift * step) * indicator_scale, 1);
            ind.uncovered = detail::clamped_round(
                (cfg.uncovered_base + cfg.uncovered_drift * step) * indicator_scale, 0);
            if (pass) {
                const double d =
                    cfg.duration_mean_s * duration_scale + rng.next_symmetric() * cfg.duration_jitter_s;
                ind.duration_s = d < 0.0 ? 0.0 : d;
                for (const SituationSpec& s : cfg.situations) {
                    const double a = s.mean_s + rng.next_symmetric() * s.jitter_s * jitter_scale;
                    ind.acting_s[s.id] = a < 0.0 ? 0.0 : a;
                }
            }
            records.push_back(RevisionRecord{
                id, i, pass ? TestOutcome::Pass : TestOutcome::Fail, std::move(ind)});
        }
        set.insert(ArtifactHistory::from_records(id, std::move(records)));
    }
    return set;
}

/// Deterministic 892-revision history of the "CCS" artifact. Outcomes:
/// fail 1..100, pass 101..121, fail 122..300, pass 301..322, fail 323..743,
/// pass 744..892 — 192 passes, 700 fails, last failure at 743, and exactly
/// three resolved failure episodes (at 100, 300 and 743). No indicators.
inline ArtifactHistory ccs_fixture() {
    const ArtifactId id{"CCS"};
    std::vector<RevisionRecord> records;
    records.reserve(892);
    const auto outcome_of = [](Revision i) {
        const bool pass = (i >= 101 && i <= 121) || (i >= 301 && i <= 322) || (i >= 744);
        return pass ? TestOutcome::Pass : TestOutcome::Fail;
    };
    for (Revision i = 1; i <= 892; ++i) {
        records.push_back(RevisionRecord{id, i, outcome_of(i), IndicatorSample{}});
    }
    return ArtifactHistory::from_records(id, std::move(records));
}

}  // namespace metametrics::synth

#endif  // METAMETRICS_SYNTH_HPP
