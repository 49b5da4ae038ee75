// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "metametrics/history.hpp"
#include "support/corpus.hpp"

using namespace metametrics;

namespace {

RevisionRecord rec(const std::string& artifact, Revision revision, TestOutcome outcome) {
    return RevisionRecord{ArtifactId(artifact), revision, outcome, {}};
}

}  // namespace

TEST_CASE("artifact id rejects empty and whitespace-only values") {
    CHECK_THROWS_AS(ArtifactId(""), Error);
    CHECK_THROWS_AS(ArtifactId("  \t"), Error);
    CHECK(ArtifactId("CCS").str() == "CCS");
}

TEST_CASE("res maps outcomes to 0 and 1") {
    STATIC_CHECK(res(TestOutcome::Pass) == 1);
    STATIC_CHECK(res(TestOutcome::Fail) == 0);
}

TEST_CASE("from_records sorts and exposes a dense history") {
    std::vector<RevisionRecord> records = {rec("a", 3, TestOutcome::Pass),
                                           rec("a", 1, TestOutcome::Fail),
                                           rec("a", 2, TestOutcome::Pass)};
    const ArtifactHistory h = ArtifactHistory::from_records(ArtifactId("a"), records);
    REQUIRE(h.size() == 3);
    CHECK(h.outcome_at(1) == TestOutcome::Fail);
    CHECK(h.outcome_at(2) == TestOutcome::Pass);
    CHECK(h.at(3).revision == 3);
    CHECK_THROWS_AS(h.at(0), Error);
    CHECK_THROWS_AS(h.at(4), Error);
}

TEST_CASE("from_records rejects empty, duplicate and gapped inputs") {
    const auto code_of = [](auto&& fn) -> ErrorCode {
        try {
            fn();
        } catch (const Error& err) {
            return err.code();
        }
        FAIL("expected an Error");
        return ErrorCode::OutOfRange;  // unreachable
    };

    CHECK(code_of([] {
              ArtifactHistory::from_records(ArtifactId("a"), {});
          }) == ErrorCode::EmptyInput);
    CHECK(code_of([&] {
              ArtifactHistory::from_records(
                  ArtifactId("a"), {rec("a", 1, TestOutcome::Pass),
                                    rec("a", 1, TestOutcome::Fail)});
          }) == ErrorCode::DuplicateRevision);
    CHECK(code_of([&] {
              ArtifactHistory::from_records(
                  ArtifactId("a"), {rec("a", 1, TestOutcome::Pass),
                                    rec("a", 3, TestOutcome::Fail)});
          }) == ErrorCode::GapInHistory);
    CHECK(code_of([&] {
              ArtifactHistory::from_records(ArtifactId("a"),
                                            {rec("b", 1, TestOutcome::Pass)});
          }) == ErrorCode::InvalidRecord);
    CHECK(code_of([&] {
              ArtifactHistory::from_records(ArtifactId("a"),
                                            {rec("a", 2, TestOutcome::Pass)});
          }) == ErrorCode::GapInHistory);
}

TEST_CASE("gap errors name the first missing revision") {
    try {
        ArtifactHistory::from_records(ArtifactId("a"), {rec("a", 1, TestOutcome::Pass),
                                                        rec("a", 2, TestOutcome::Pass),
                                                        rec("a", 5, TestOutcome::Fail)});
        FAIL("expected GapInHistory");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::GapInHistory);
        CHECK(err.revisions() == std::vector<Revision>{3});
    }
}

TEST_CASE("record value ranges are enforced") {
    const auto expect_invalid = [](RevisionRecord r, const std::string& field) {
        try {
            ArtifactHistory::from_records(r.artifact, {r});
            FAIL("expected InvalidRecord for " + field);
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::InvalidRecord);
            CHECK(err.subject() == field);
        }
    };

    RevisionRecord r = rec("a", 1, TestOutcome::Pass);
    r.indicators.sloc = 0;
    expect_invalid(r, "sloc");

    r = rec("a", 1, TestOutcome::Pass);
    r.indicators.misra_warnings = -1;
    expect_invalid(r, "misra_warnings");

    r = rec("a", 1, TestOutcome::Pass);
    r.indicators.mccabe = 0;
    expect_invalid(r, "mccabe");

    r = rec("a", 1, TestOutcome::Pass);
    r.indicators.uncovered = -5;
    expect_invalid(r, "uncovered");

    r = rec("a", 1, TestOutcome::Pass);
    r.indicators.duration_s = -0.5;
    expect_invalid(r, "duration_s");

    r = rec("a", 1, TestOutcome::Pass);
    r.indicators.acting_s["cutin"] = -1.0;
    expect_invalid(r, "acting_s");

    r = rec("a", 1, TestOutcome::Pass);
    r.indicators.acting_s[""] = 1.0;
    expect_invalid(r, "acting_s");
}

TEST_CASE("prefix returns the leading sub-history") {
    const ArtifactHistory h = testsupport::history_from_pattern("a", "FppFp");
    const ArtifactHistory p = h.prefix(3);
    REQUIRE(p.size() == 3);
    CHECK(p.at(3) == h.at(3));
    CHECK_THROWS_AS(h.prefix(0), Error);
    CHECK_THROWS_AS(h.prefix(6), Error);
}

TEST_CASE("build_history groups records and is permutation invariant") {
    std::vector<RevisionRecord> records = {
        rec("b", 1, TestOutcome::Pass), rec("a", 2, TestOutcome::Fail),
        rec("a", 1, TestOutcome::Pass), rec("b", 2, TestOutcome::Pass),
    };
    const HistorySet forward = build_history(records);
    std::reverse(records.begin(), records.end());
    const HistorySet backward = build_history(records);
    CHECK(forward == backward);
    REQUIRE(forward.size() == 2);
    CHECK(forward.total_revisions() == 4);
    CHECK(forward.at(ArtifactId("a")).outcome_at(2) == TestOutcome::Fail);
    CHECK(forward.find(ArtifactId("c")) == nullptr);
    CHECK_THROWS_AS(forward.at(ArtifactId("c")), Error);
}

TEST_CASE("history set rejects duplicate artifacts and empty input") {
    HistorySet set;
    set.insert(testsupport::history_from_pattern("a", "p"));
    CHECK_THROWS_AS(set.insert(testsupport::history_from_pattern("a", "F")), Error);
    CHECK_THROWS_AS(build_history({}), Error);
}
