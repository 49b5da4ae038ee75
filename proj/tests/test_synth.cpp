// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic history generation: PRNG reference vectors, frozen generator
// output, deterministic injection effects and config validation.

#include <catch2/catch_amalgamated.hpp>
#include <functional>
#include <string>

#include "metametrics/synth.hpp"
#include "metametrics/metrics.hpp"

using namespace metametrics;
using Catch::Approx;

namespace {

std::string outcome_string(const ArtifactHistory& h) {
    std::string s;
    for (Revision i = 1; i <= h.size(); ++i) {
        s += h.outcome_at(i) == TestOutcome::Pass ? 'p' : 'F';
    }
    return s;
}

std::string config_subject(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& err) {
        REQUIRE(err.code() == ErrorCode::InvalidConfig);
        return err.subject();
    }
    FAIL("expected InvalidConfig");
    return {};
}

synth::GeneratorConfig small_config() {
    synth::GeneratorConfig cfg;
    cfg.artifact_count = 2;
    cfg.revisions_per_artifact = 8;
    cfg.pass_probability = 0.6;
    cfg.sloc_base = 100.4;
    cfg.sloc_growth = 0.3;
    cfg.misra_base = 2.0;
    cfg.misra_drift = 0.5;
    cfg.mccabe_base = 3.0;
    cfg.uncovered_base = 10.0;
    cfg.uncovered_drift = -4.0;
    cfg.duration_mean_s = 2.0;
    cfg.duration_jitter_s = 0.5;
    cfg.situations = {{"cutin", 1.0, 0.25}};
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("stream generator matches the published reference vector") {
    // Finalizer constants and seed-0 outputs of the widely used splitmix64.
    synth::SplitMix64 rng(0);
    const std::uint64_t a = rng.next();
    const std::uint64_t b = rng.next();
    const std::uint64_t c = rng.next();
    CHECK(a == 0xE220A8397B1DCDAFull);
    CHECK(b == 0x6E789E6AA1B965F4ull);
    CHECK(c == 0x06C45D188009454Full);

    synth::SplitMix64 d(0);
    const double x = d.next_double();
    CHECK(x == Approx(0.88331080821364261).epsilon(1e-15));
    CHECK(x >= 0.0);
    CHECK(x < 1.0);

    synth::SplitMix64 s(42);
    for (int i = 0; i < 1000; ++i) {
        const double v = s.next_symmetric();
        CHECK(v >= -1.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("generation is a pure function of the config") {
    const synth::GeneratorConfig cfg = small_config();
    const HistorySet first = synth::generate(cfg);
    const HistorySet second = synth::generate(cfg);
    CHECK(first == second);

    synth::GeneratorConfig reseeded = cfg;
    reseeded.seed = 8;
    CHECK(synth::generate(reseeded) != first);
}

TEST_CASE("frozen output of a small config") {
    const HistorySet set = synth::generate(small_config());
    REQUIRE(set.size() == 2);
    const ArtifactHistory& a0 = set.at(ArtifactId("art-0000"));
    const ArtifactHistory& a1 = set.at(ArtifactId("art-0001"));
    CHECK(outcome_string(a0) == "FFppFppF");
    CHECK(outcome_string(a1) == "pFpppFpp");

    // Indicator processes are deterministic in i: base + drift * (i - 1),
    // rounded half away from zero, clamped to the field's range.
    CHECK(*a0.at(1).indicators.sloc == 100);
    CHECK(*a0.at(2).indicators.sloc == 101);
    CHECK(*a0.at(5).indicators.sloc == 102);
    CHECK(*a0.at(2).indicators.misra_warnings == 3);  // round(2.5)
    CHECK(*a0.at(4).indicators.misra_warnings == 4);  // round(3.5)
    CHECK(*a0.at(3).indicators.uncovered == 2);
    CHECK(*a0.at(4).indicators.uncovered == 0);  // clamped from -2
    CHECK(*a1.at(8).indicators.mccabe == 3);

    // Frozen stochastic draws.
    CHECK(*a0.at(3).indicators.duration_s == Approx(2.1042348053683146).epsilon(1e-15));
    CHECK(a0.at(3).indicators.acting_s.at("cutin") ==
          Approx(0.92402925078956732).epsilon(1e-15));
    CHECK(*a1.at(8).indicators.duration_s == Approx(2.3604651145499891).epsilon(1e-15));

    // Failing revisions carry indicators but no timing data.
    CHECK_FALSE(a0.at(1).indicators.duration_s.has_value());
    CHECK(a0.at(1).indicators.acting_s.empty());
}

TEST_CASE("pass probability extremes are exact") {
    synth::GeneratorConfig cfg;
    cfg.artifact_count = 2;
    cfg.revisions_per_artifact = 40;
    cfg.situations = {{"cutin", 1.0, 0.0}};
    cfg.seed = 11;

    cfg.pass_probability = 1.0;
    for (const auto& [id, h] : synth::generate(cfg)) {
        CHECK(r_succeeded(h, h.size()) == h.size());
        for (Revision i = 1; i <= h.size(); ++i) {
            CHECK(h.at(i).indicators.duration_s.has_value());
            CHECK(h.at(i).indicators.acting_s.at("cutin") == 1.0);  // jitter-free
        }
    }

    cfg.pass_probability = 0.0;
    for (const auto& [id, h] : synth::generate(cfg)) {
        CHECK(r_succeeded(h, h.size()) == 0);
    }
}

TEST_CASE("failure-rate injection saturates the failure probability") {
    synth::GeneratorConfig cfg;
    cfg.artifact_count = 3;
    cfg.revisions_per_artifact = 30;
    cfg.pass_probability = 0.9;
    cfg.injections = {{16, synth::InjectionKind::FailureRate, 9.0}};  // 0.1 * 10 = 1
    cfg.seed = 3;
    for (const auto& [id, h] : synth::generate(cfg)) {
        for (Revision i = 16; i <= 30; ++i) {
            CHECK(h.outcome_at(i) == TestOutcome::Fail);
        }
    }
}

TEST_CASE("duration-drift injection rescales the mean exactly when jitter-free") {
    synth::GeneratorConfig cfg;
    cfg.artifact_count = 1;
    cfg.revisions_per_artifact = 6;
    cfg.pass_probability = 1.0;
    cfg.duration_mean_s = 2.0;
    cfg.injections = {{4, synth::InjectionKind::DurationDrift, 0.5}};
    cfg.seed = 1;
    const HistorySet set = synth::generate(cfg);
    const ArtifactHistory& h = set.at(ArtifactId("art-0000"));
    for (Revision i = 1; i <= 3; ++i) CHECK(*h.at(i).indicators.duration_s == 2.0);
    for (Revision i = 4; i <= 6; ++i) CHECK(*h.at(i).indicators.duration_s == 3.0);
}

TEST_CASE("indicator-spike injection scales counts but never sloc") {
    synth::GeneratorConfig cfg;
    cfg.artifact_count = 1;
    cfg.revisions_per_artifact = 4;
    cfg.pass_probability = 1.0;
    cfg.sloc_base = 1000.0;
    cfg.misra_base = 10.0;
    cfg.mccabe_base = 4.0;
    cfg.uncovered_base = 8.0;
    cfg.injections = {{3, synth::InjectionKind::IndicatorSpike, 1.0}};
    cfg.seed = 5;
    const HistorySet set = synth::generate(cfg);
    const ArtifactHistory& h = set.at(ArtifactId("art-0000"));
    CHECK(*h.at(2).indicators.misra_warnings == 10);
    CHECK(*h.at(3).indicators.misra_warnings == 20);
    CHECK(*h.at(3).indicators.mccabe == 8);
    CHECK(*h.at(3).indicators.uncovered == 16);
    CHECK(*h.at(3).indicators.sloc == 1000);
}

TEST_CASE("acting-variance injection widens only the jitter term") {
    // With zero jitter the acting time stays at the mean no matter the scale.
    synth::GeneratorConfig cfg;
    cfg.artifact_count = 1;
    cfg.revisions_per_artifact = 5;
    cfg.pass_probability = 1.0;
    cfg.situations = {{"cutin", 1.0, 0.0}};
    cfg.injections = {{2, synth::InjectionKind::ActingVariance, 5.0}};
    cfg.seed = 9;
    const HistorySet flat = synth::generate(cfg);
    const ArtifactHistory& h = flat.at(ArtifactId("art-0000"));
    for (Revision i = 1; i <= 5; ++i) CHECK(h.at(i).indicators.acting_s.at("cutin") == 1.0);

    // With jitter the draws differ from the uninjected run beyond the start.
    synth::GeneratorConfig jittered = cfg;
    jittered.situations = {{"cutin", 1.0, 0.1}};
    synth::GeneratorConfig baseline = jittered;
    baseline.injections.clear();
    const HistorySet jset = synth::generate(jittered);
    const HistorySet bset = synth::generate(baseline);
    const ArtifactHistory& hj = jset.at(ArtifactId("art-0000"));
    const ArtifactHistory& hb = bset.at(ArtifactId("art-0000"));
    CHECK(hj.at(1).indicators.acting_s.at("cutin") ==
          hb.at(1).indicators.acting_s.at("cutin"));
    // Same underlying draw, scaled deviation from the mean.
    const double dev_b = hb.at(3).indicators.acting_s.at("cutin") - 1.0;
    const double dev_j = hj.at(3).indicators.acting_s.at("cutin") - 1.0;
    CHECK(dev_j == Approx(5.0 * dev_b));
}

TEST_CASE("configs are validated field by field") {
    const auto with = [](const std::function<void(synth::GeneratorConfig&)>& tweak) {
        return [tweak] {
            synth::GeneratorConfig cfg;
            tweak(cfg);
            synth::generate(cfg);
        };
    };
    using GC = synth::GeneratorConfig;
    CHECK(config_subject(with([](GC& c) { c.artifact_count = 0; })) == "artifact_count");
    CHECK(config_subject(with([](GC& c) { c.artifact_count = 10001; })) == "artifact_count");
    CHECK(config_subject(with([](GC& c) { c.revisions_per_artifact = 0; })) ==
          "revisions_per_artifact");
    CHECK(config_subject(with([](GC& c) { c.pass_probability = 1.5; })) == "pass_probability");
    CHECK(config_subject(with([](GC& c) { c.pass_probability = -0.1; })) == "pass_probability");
    CHECK(config_subject(with([](GC& c) { c.sloc_base = 0.0; })) == "sloc_base");
    CHECK(config_subject(with([](GC& c) { c.misra_base = -1.0; })) == "misra_base");
    CHECK(config_subject(with([](GC& c) { c.mccabe_base = 0.5; })) == "mccabe_base");
    CHECK(config_subject(with([](GC& c) { c.uncovered_base = -2.0; })) == "uncovered_base");
    CHECK(config_subject(with([](GC& c) { c.duration_mean_s = -1.0; })) == "duration_mean_s");
    CHECK(config_subject(with([](GC& c) { c.duration_jitter_s = -0.5; })) ==
          "duration_jitter_s");
    CHECK(config_subject(with([](GC& c) { c.situations = {{"", 1.0, 0.0}}; })) == "situations");
    CHECK(config_subject(with([](GC& c) {
              c.situations = {{"x", 1.0, 0.0}, {"x", 2.0, 0.0}};
          })) == "situations");
    CHECK(config_subject(with([](GC& c) { c.situations = {{"x", -1.0, 0.0}}; })) ==
          "situations");
    CHECK(config_subject(with([](GC& c) {
              c.injections = {{0, synth::InjectionKind::FailureRate, 1.0}};
          })) == "injections");
    CHECK(config_subject(with([](GC& c) {
              c.injections = {{1, synth::InjectionKind::FailureRate, -0.5}};
          })) == "injections");
    CHECK(config_subject(with([](GC& c) {
              c.injections = {{1, synth::InjectionKind::ActingVariance, 0.0}};
          })) == "injections");
    CHECK(config_subject(with([](GC& c) {
              c.injections = {{1, synth::InjectionKind::DurationDrift, -1.5}};
          })) == "injections");
}

TEST_CASE("config JSON parsing applies defaults and rejects junk") {
    const auto cfg = synth::GeneratorConfig::from_json(nlohmann::json::parse(R"({
        "artifact_count": 2,
        "revisions_per_artifact": 50,
        "pass_probability": 0.8,
        "situations": [{"id": "cutin", "mean_s": 1.5, "jitter_s": 0.2}],
        "injections": [{"kind": "duration-drift", "start_revision": 20, "magnitude": 0.3}],
        "seed": 99
    })"));
    CHECK(cfg.artifact_count == 2);
    CHECK(cfg.pass_probability == 0.8);
    CHECK(cfg.sloc_base == 1000.0);  // default
    REQUIRE(cfg.situations.size() == 1);
    CHECK(cfg.situations[0].id == "cutin");
    CHECK(cfg.situations[0].jitter_s == 0.2);
    REQUIRE(cfg.injections.size() == 1);
    CHECK(cfg.injections[0].kind == synth::InjectionKind::DurationDrift);
    CHECK(cfg.injections[0].start_revision == 20);
    CHECK(cfg.seed == 99);

    const auto from = [](const char* text) {
        return [text] { synth::GeneratorConfig::from_json(nlohmann::json::parse(text)); };
    };
    CHECK(config_subject(from(R"({"surprise": 1})")) == "surprise");
    CHECK(config_subject(from(R"({"artifact_count": 1.5})")) == "artifact_count");
    CHECK(config_subject(from(R"({"pass_probability": "high"})")) == "pass_probability");
    CHECK(config_subject(from(R"({"situations": [{"mean_s": 1}]})")) == "situations");
    CHECK(config_subject(from(R"({"injections": [{"kind": "meteor"}]})")) == "injections");
    CHECK_THROWS_AS(synth::GeneratorConfig::from_json(nlohmann::json::parse("[]")), Error);
}

TEST_CASE("config loading reports io and parse errors") {
    try {
        synth::GeneratorConfig::load("/nonexistent/config.json");
        FAIL("expected IoError");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::IoError);
    }
}

TEST_CASE("long fixture history has the advertised shape") {
    const ArtifactHistory h = synth::ccs_fixture();
    CHECK(h.artifact().str() == "CCS");
    REQUIRE(h.size() == 892);
    CHECK(h.outcome_at(100) == TestOutcome::Fail);
    CHECK(h.outcome_at(101) == TestOutcome::Pass);
    CHECK(h.outcome_at(121) == TestOutcome::Pass);
    CHECK(h.outcome_at(122) == TestOutcome::Fail);
    CHECK(h.outcome_at(300) == TestOutcome::Fail);
    CHECK(h.outcome_at(301) == TestOutcome::Pass);
    CHECK(h.outcome_at(322) == TestOutcome::Pass);
    CHECK(h.outcome_at(323) == TestOutcome::Fail);
    CHECK(h.outcome_at(743) == TestOutcome::Fail);
    CHECK(h.outcome_at(744) == TestOutcome::Pass);
    CHECK(h.outcome_at(892) == TestOutcome::Pass);
    CHECK(h.at(1).indicators.empty());
    CHECK(synth::ccs_fixture() == h);
}
