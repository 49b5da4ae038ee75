// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end runs of the command-line tool: exit codes, diagnostics and
// byte-level reproducibility.

#include <catch2/catch_amalgamated.hpp>
#include <string>

#include "metametrics/synth.hpp"
#include "support/run_cli.hpp"

using metametrics::testsupport::CliResult;
using metametrics::testsupport::read_file;
using metametrics::testsupport::run_cli;
using metametrics::testsupport::TempDir;

namespace {

/// Writes the built-in long history and returns its path.
std::string fixture_file(const TempDir& dir) {
    const std::string path = dir.file("fixture.jsonl");
    const CliResult result = run_cli("fixture --out '" + path + "'");
    REQUIRE(result.exit_code == 0);
    return path;
}

}  // namespace

TEST_CASE("validate accepts the built-in history") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const CliResult result = run_cli("validate --input '" + input + "'");
    CHECK(result.exit_code == 0);
    CHECK(result.out == "ok: 1 artifact(s), 892 revision(s)\n");
}

TEST_CASE("validate reports line-attributed issues and exits 3") {
    TempDir dir;
    const std::string input = dir.write(
        "bad.jsonl",
        "{\"artifact\":\"a\",\"revision\":0,\"result\":\"pass\"}\n"
        "{\"artifact\":\"a\",\"revision\":1,\"result\":\"maybe\"}\n");
    const CliResult result = run_cli("validate --input '" + input + "'");
    CHECK(result.exit_code == 3);
    CHECK(result.out.find("(line 1)") != std::string::npos);
    CHECK(result.out.find("rerun with --collect-errors") != std::string::npos);

    const CliResult all = run_cli("validate --input '" + input + "' --collect-errors");
    CHECK(all.exit_code == 3);
    CHECK(all.out.find("(line 1)") != std::string::npos);
    CHECK(all.out.find("(line 2)") != std::string::npos);
}

TEST_CASE("validate honours lenient and renumber flags") {
    TempDir dir;
    const std::string input = dir.write(
        "odd.jsonl",
        "{\"artifact\":\"a\",\"revision\":10,\"result\":\"pass\",\"note\":\"x\"}\n"
        "{\"artifact\":\"a\",\"revision\":30,\"result\":\"fail\",\"note\":\"y\"}\n");
    CHECK(run_cli("validate --input '" + input + "'").exit_code == 3);
    CHECK(run_cli("validate --input '" + input + "' --lenient").exit_code == 3);
    const CliResult ok = run_cli("validate --input '" + input + "' --lenient --renumber");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out == "ok: 1 artifact(s), 2 revision(s)\n");
}

TEST_CASE("missing input file exits 3") {
    const CliResult result = run_cli("validate --input /nonexistent/x.jsonl");
    CHECK(result.exit_code == 3);
}

TEST_CASE("empty input exits 3") {
    TempDir dir;
    const std::string input = dir.write("empty.jsonl", "");
    const CliResult result = run_cli("compute --input '" + input + "' --gate 1");
    CHECK(result.exit_code == 3);
}

TEST_CASE("compute emits a versioned JSON report") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const CliResult result =
        run_cli("compute --input '" + input + "' --gate 768 --gate 892", false);
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out);
    CHECK(doc.at("schema") == "metametrics/1");
    CHECK(doc.at("artifacts").size() == 1);
    const auto& artifact = doc.at("artifacts").at(0);
    CHECK(artifact.at("artifact") == "CCS");
    CHECK(artifact.at("gates").at(1).at("r_succeeded") == 192);
    CHECK(artifact.at("gates").at(1).at("neg_age") == 149);
    CHECK(artifact.at("pairs").at(0).at("q2").at("value") == 124.0);
    CHECK_FALSE(doc.contains("generated_at"));
}

TEST_CASE("compute output is byte-identical across runs") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const std::string cmd = "compute --input '" + input + "' --gate 400 --gate 892";
    const CliResult first = run_cli(cmd, false);
    const CliResult second = run_cli(cmd, false);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);

    // --stamp embeds a timestamp field.
    const CliResult stamped = run_cli(cmd + " --stamp", false);
    CHECK(nlohmann::json::parse(stamped.out).contains("generated_at"));
}

TEST_CASE("compute rejects an out-of-range gate with exit 2") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const CliResult result = run_cli("compute --input '" + input + "' --gate 900");
    CHECK(result.exit_code == 2);
    CHECK(result.out.find("892") != std::string::npos);
}

TEST_CASE("compute rejects unordered gates and unknown names with exit 2") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    CHECK(run_cli("compute --input '" + input + "' --gate 800 --gate 700").exit_code == 2);
    CHECK(run_cli("compute --input '" + input + "' --gate 892 --indicator bogus").exit_code ==
          2);
    CHECK(run_cli("compute --input '" + input + "' --gate 892 --situation ''").exit_code == 2);
    CHECK(run_cli("compute --input '" + input + "'").exit_code == 2);  // --gate required
    CHECK(run_cli("compute --input '" + input + "' --gate 892 --format yaml").exit_code == 2);
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
}

TEST_CASE("markdown format quotes the long history's figures") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const CliResult result = run_cli(
        "compute --input '" + input + "' --gate 768 --gate 892 --format markdown", false);
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("# Quality metrics report") == 0);
    for (const char* token : {"192", "700", "743", "149", "124", "64"}) {
        CAPTURE(token);
        CHECK(result.out.find(token) != std::string::npos);
    }
}

TEST_CASE("gates exits 0 on a passing policy and 1 on a failing one") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const std::string passing = dir.write("pass.json", R"({
        "gates": [{"name": "early", "revision": 768}, {"name": "late", "revision": 892}],
        "rules": [{"metric": "q2", "cmp": ">=", "threshold": 0}]
    })");
    const CliResult ok = run_cli("gates --input '" + input + "' --policy '" + passing + "'",
                                 false);
    CHECK(ok.exit_code == 0);
    const auto doc = nlohmann::json::parse(ok.out);
    CHECK(doc.at("verdicts").at(0).at("overall") == "pass");

    const std::string failing = dir.write("fail.json", R"({
        "gates": [{"revision": 768}, {"revision": 892}],
        "rules": [{"metric": "q1", "cmp": ">=", "threshold": 0.9}]
    })");
    const CliResult bad = run_cli("gates --input '" + input + "' --policy '" + failing + "'",
                                  false);
    CHECK(bad.exit_code == 1);
    CHECK(nlohmann::json::parse(bad.out).at("verdicts").at(0).at("overall") == "fail");
}

TEST_CASE("gates rejects malformed policies with exit 2") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const std::string empty = dir.write("empty.json", R"({"gates": []})");
    CHECK(run_cli("gates --input '" + input + "' --policy '" + empty + "'").exit_code == 2);
    const std::string junk = dir.write("junk.json", "{");
    CHECK(run_cli("gates --input '" + input + "' --policy '" + junk + "'").exit_code == 3);
    CHECK(run_cli("gates --input '" + input + "' --policy /nonexistent/p.json").exit_code == 3);
}

TEST_CASE("heatmap writes the CSV to a file or stdout") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const std::string out = dir.file("map.csv");
    const CliResult result = run_cli("heatmap --input '" + input +
                                     "' --gate 768 --gate 892 --metric r_plus --metric q2 "
                                     "--metric q3 --out '" +
                                     out + "'");
    REQUIRE(result.exit_code == 0);
    const std::string csv = read_file(out);
    CHECK(csv.find("artifact,r_plus,q2,q3") == 0);
    CHECK(csv.find("# raw") != std::string::npos);
    // Single artifact: every defined column is degenerate and normalizes to 0.5.
    CHECK(csv.find("CCS,0.500000,0.500000,0.500000") != std::string::npos);
    CHECK(csv.find("CCS,0.21524663677130046,124,64") != std::string::npos);

    const CliResult to_stdout = run_cli(
        "heatmap --input '" + input + "' --gate 892 --metric neg_age --out -", false);
    REQUIRE(to_stdout.exit_code == 0);
    CHECK(to_stdout.out.find("artifact,neg_age") == 0);
    CHECK(to_stdout.out.find("CCS,0.500000") != std::string::npos);
    CHECK(to_stdout.out.find("CCS,149") != std::string::npos);

    CHECK(run_cli("heatmap --input '" + input + "' --gate 892 --metric nope --out -")
              .exit_code == 2);
}

TEST_CASE("generate is bit-reproducible and its output validates") {
    TempDir dir;
    const std::string config = dir.write("config.json", R"({
        "artifact_count": 3,
        "revisions_per_artifact": 40,
        "pass_probability": 0.7,
        "duration_mean_s": 2.0,
        "duration_jitter_s": 0.3,
        "situations": [{"id": "cutin", "mean_s": 1.0, "jitter_s": 0.2}],
        "seed": 31
    })");
    const std::string out1 = dir.file("one.jsonl");
    const std::string out2 = dir.file("two.jsonl");
    REQUIRE(run_cli("generate --config '" + config + "' --out '" + out1 + "'").exit_code == 0);
    REQUIRE(run_cli("generate --config '" + config + "' --out '" + out2 + "'").exit_code == 0);
    CHECK(read_file(out1) == read_file(out2));

    const CliResult validated = run_cli("validate --input '" + out1 + "'");
    CHECK(validated.exit_code == 0);
    CHECK(validated.out == "ok: 3 artifact(s), 120 revision(s)\n");

    const std::string bad = dir.write("bad.json", R"({"pass_probability": 2.0})");
    CHECK(run_cli("generate --config '" + bad + "' --out -").exit_code == 2);
    CHECK(run_cli("generate --config /nonexistent/c.json --out -").exit_code == 3);
}

TEST_CASE("thread cap changes nothing about the output") {
    TempDir dir;
    const std::string input = fixture_file(dir);
    const std::string cmd = "compute --input '" + input + "' --gate 768 --gate 892";
    const CliResult serial = run_cli(cmd, false, "METAMETRICS_THREADS=1 ");
    const CliResult parallel = run_cli(cmd, false, "METAMETRICS_THREADS=4 ");
    const CliResult automatic = run_cli(cmd, false, "METAMETRICS_THREADS=0 ");
    REQUIRE(serial.exit_code == 0);
    CHECK(serial.out == parallel.out);
    CHECK(serial.out == automatic.out);

    CHECK(run_cli(cmd, true, "METAMETRICS_THREADS=abc ").exit_code == 2);
    CHECK(run_cli(cmd, true, "METAMETRICS_THREADS=9999 ").exit_code == 2);
}

TEST_CASE("fixture output is stable") {
    TempDir dir;
    const std::string a = fixture_file(dir);
    const std::string b = dir.file("fixture2.jsonl");
    REQUIRE(run_cli("fixture --out '" + b + "'").exit_code == 0);
    CHECK(read_file(a) == read_file(b));
    // First line is the canonical minimal record for revision 1.
    const std::string text = read_file(a);
    CHECK(text.find("{\"artifact\":\"CCS\",\"revision\":1,\"result\":\"fail\"}\n") == 0);
}
