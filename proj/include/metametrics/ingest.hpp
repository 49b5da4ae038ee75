// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// History files are JSON Lines, UTF-8, LF, no BOM. One object per line:
//
//   {"artifact":"CCS","revision":17,"result":"pass",
//    "sloc":1200,"misra_warnings":3,"mccabe":14,"uncovered":7,
//    "duration_s":2.5,"acting_s":{"cutin":1.25}}
//
// artifact, revision and result are required. Unknown keys are rejected
// unless lenient is set. The canonical writer emits artifacts in id order,
// revisions ascending, keys in the order above, acting_s keys sorted; loading
// a written file reproduces the HistorySet exactly.

#ifndef METAMETRICS_INGEST_HPP
#define METAMETRICS_INGEST_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "metametrics/error.hpp"
#include "metametrics/history.hpp"

namespace metametrics {

struct LoadOptions {
    bool lenient = false;   // ignore unknown keys instead of rejecting them
    bool renumber = false;  // remap each artifact's revisions to dense 1..N
};

struct LoadIssue {
    std::size_t line = 0;  // 1-based, 0 when no line applies
    ErrorCode code = ErrorCode::ParseError;
    std::string subject;
    std::string message;

    Error to_error() const {
        std::string msg = message;
        if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
        return Error(code, msg, subject);
    }
};

struct LoadResult {
    HistorySet set;  // meaningful only when issues is empty
    std::vector<LoadIssue> issues;

    bool ok() const noexcept { return issues.empty(); }
};

namespace detail {

struct PendingRecord {
    RevisionRecord record;
    std::size_t line;
};

inline void issue(std::vector<LoadIssue>& issues, std::size_t line, ErrorCode code,
                  std::string subject, std::string message) {
    issues.push_back(LoadIssue{line, code, std::move(subject), std::move(message)});
}

inline bool read_count(const nlohmann::json& value, std::int64_t min_value, std::int64_t& out) {
    if (!value.is_number_integer()) return false;
    out = value.get<std::int64_t>();
    return out >= min_value;
}

/// Parses one line into a record; a parse or schema problem records an issue
/// and yields nullopt.
inline std::optional<PendingRecord> parse_line(const std::string& text, std::size_t line,
                                               const LoadOptions& options,
                                               std::vector<LoadIssue>& issues) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        issue(issues, line, ErrorCode::ParseError, "", e.what());
        return std::nullopt;
    }
    if (!doc.is_object()) {
        issue(issues, line, ErrorCode::SchemaViolation, "", "record must be a JSON object");
        return std::nullopt;
    }

    static const char* known[] = {"artifact", "revision", "result", "sloc",
                                  "misra_warnings", "mccabe", "uncovered",
                                  "duration_s", "acting_s"};
    if (!options.lenient) {
        for (const auto& [key, value] : doc.items()) {
            bool ok = false;
            for (const char* k : known) ok = ok || key == k;
            if (!ok) {
                issue(issues, line, ErrorCode::SchemaViolation, key, "unknown key '" + key + "'");
                return std::nullopt;
            }
        }
    }

    const auto violation = [&](const std::string& field,
                               const std::string& why) -> std::optional<PendingRecord> {
        issue(issues, line, ErrorCode::SchemaViolation, field, field + " " + why);
        return std::nullopt;
    };

    if (!doc.contains("artifact") || !doc.at("artifact").is_string()) {
        return violation("artifact", "must be a string");
    }
    std::optional<ArtifactId> artifact;
    try {
        artifact.emplace(doc.at("artifact").get<std::string>());
    } catch (const Error&) {
        return violation("artifact", "must be non-empty");
    }

    std::int64_t revision = 0;
    if (!doc.contains("revision") || !read_count(doc.at("revision"), 1, revision)) {
        return violation("revision", "must be an integer >= 1");
    }

    if (!doc.contains("result") || !doc.at("result").is_string()) {
        return violation("result", "must be \"pass\" or \"fail\"");
    }
    const std::string result = doc.at("result").get<std::string>();
    if (result != "pass" && result != "fail") {
        return violation("result", "must be \"pass\" or \"fail\"");
    }

    IndicatorSample ind;
    std::int64_t count = 0;
    if (doc.contains("sloc")) {
        if (!read_count(doc.at("sloc"), 1, count)) return violation("sloc", "must be an integer >= 1");
        ind.sloc = count;
    }
    if (doc.contains("misra_warnings")) {
        if (!read_count(doc.at("misra_warnings"), 0, count)) {
            return violation("misra_warnings", "must be an integer >= 0");
        }
        ind.misra_warnings = count;
    }
    if (doc.contains("mccabe")) {
        if (!read_count(doc.at("mccabe"), 1, count)) {
            return violation("mccabe", "must be an integer >= 1");
        }
        ind.mccabe = count;
    }
    if (doc.contains("uncovered")) {
        if (!read_count(doc.at("uncovered"), 0, count)) {
            return violation("uncovered", "must be an integer >= 0");
        }
        ind.uncovered = count;
    }
    if (doc.contains("duration_s")) {
        const nlohmann::json& v = doc.at("duration_s");
        if (!v.is_number() || v.get<double>() < 0.0) {
            return violation("duration_s", "must be a number >= 0");
        }
        ind.duration_s = v.get<double>();
    }
    if (doc.contains("acting_s")) {
        const nlohmann::json& acting = doc.at("acting_s");
        if (!acting.is_object()) return violation("acting_s", "must be an object");
        for (const auto& [situation, v] : acting.items()) {
            if (situation.empty()) return violation("acting_s", "situation ids must be non-empty");
            if (!v.is_number() || v.get<double>() < 0.0) {
                return violation("acting_s", "entry '" + situation + "' must be a number >= 0");
            }
            ind.acting_s[situation] = v.get<double>();
        }
    }

    return PendingRecord{RevisionRecord{std::move(*artifact), static_cast<Revision>(revision),
                                        result == "pass" ? TestOutcome::Pass : TestOutcome::Fail,
                                        std::move(ind)},
                         line};
}

}  // namespace detail

/// Parses a whole stream, collecting every issue instead of throwing.
/// The returned set is only meaningful when issues is empty. Density checks
/// run only when every line parsed, so a malformed record does not cascade
/// into spurious gap reports.
inline LoadResult try_load_history_set(std::istream& in, const LoadOptions& options = {}) {
    LoadResult result;
    std::map<ArtifactId, std::vector<detail::PendingRecord>> by_artifact;

    std::string line_text;
    std::size_t line_no = 0;
    std::size_t parsed_lines = 0;
    while (std::getline(in, line_text)) {
        ++line_no;
        if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
        if (line_no == 1 && line_text.starts_with("\xEF\xBB\xBF")) {
            detail::issue(result.issues, line_no, ErrorCode::ParseError, "",
                          "byte order mark not allowed (UTF-8 without BOM)");
            continue;
        }
        if (line_text.find_first_not_of(" \t") == std::string::npos) continue;
        ++parsed_lines;
        if (auto pending = detail::parse_line(line_text, line_no, options, result.issues)) {
            by_artifact[pending->record.artifact].push_back(std::move(*pending));
        }
    }
    if (parsed_lines == 0 && result.issues.empty()) {
        detail::issue(result.issues, 0, ErrorCode::EmptyInput, "", "no records in input");
        return result;
    }

    const std::size_t line_issue_count = result.issues.size();
    for (auto& [id, pendings] : by_artifact) {
        std::stable_sort(pendings.begin(), pendings.end(),
                         [](const detail::PendingRecord& a, const detail::PendingRecord& b) {
                             return a.record.revision < b.record.revision;
                         });
        bool artifact_ok = true;
        for (std::size_t k = 0; k + 1 < pendings.size(); ++k) {
            if (pendings[k].record.revision == pendings[k + 1].record.revision) {
                const std::size_t later_line =
                    std::max(pendings[k].line, pendings[k + 1].line);
                detail::issue(result.issues, later_line, ErrorCode::DuplicateRevision, id.str(),
                              "duplicate revision " + std::to_string(pendings[k].record.revision) +
                                  " for artifact '" + id.str() + "'");
                artifact_ok = false;
            }
        }
        if (!artifact_ok) continue;
        if (options.renumber) {
            Revision next = 1;
            for (detail::PendingRecord& p : pendings) p.record.revision = next++;
        } else if (line_issue_count == 0) {
            Revision expected = 1;
            for (const detail::PendingRecord& p : pendings) {
                if (p.record.revision != expected) {
                    detail::issue(result.issues, p.line, ErrorCode::GapInHistory, id.str(),
                                  "artifact '" + id.str() + "' is missing revision " +
                                      std::to_string(expected));
                    artifact_ok = false;
                    break;
                }
                ++expected;
            }
        }
        if (!artifact_ok || !result.issues.empty()) continue;
        std::vector<RevisionRecord> records;
        records.reserve(pendings.size());
        for (detail::PendingRecord& p : pendings) records.push_back(std::move(p.record));
        try {
            result.set.insert(ArtifactHistory::from_records(id, std::move(records)));
        } catch (const Error& err) {
            detail::issue(result.issues, 0, err.code(), err.subject(), err.what());
        }
    }
    return result;
}

/// Throwing variant: raises the first issue as an Error with "line N:" in the
/// message.
inline HistorySet load_history_set(std::istream& in, const LoadOptions& options = {}) {
    LoadResult result = try_load_history_set(in, options);
    if (!result.ok()) throw result.issues.front().to_error();
    return std::move(result.set);
}

inline LoadResult try_load_history_file(const std::string& path, const LoadOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        LoadResult result;
        detail::issue(result.issues, 0, ErrorCode::IoError, path,
                      "cannot open history file '" + path + "'");
        return result;
    }
    return try_load_history_set(in, options);
}

inline HistorySet load_history_file(const std::string& path, const LoadOptions& options = {}) {
    LoadResult result = try_load_history_file(path, options);
    if (!result.ok()) throw result.issues.front().to_error();
    return std::move(result.set);
}

inline void write_history_set(const HistorySet& set, std::ostream& out) {
    for (const auto& [id, history] : set) {
        for (Revision i = 1; i <= history.size(); ++i) {
            const RevisionRecord& rec = history.at(i);
            nlohmann::ordered_json j;
            j["artifact"] = id.str();
            j["revision"] = rec.revision;
            j["result"] = rec.outcome == TestOutcome::Pass ? "pass" : "fail";
            const IndicatorSample& ind = rec.indicators;
            if (ind.sloc) j["sloc"] = *ind.sloc;
            if (ind.misra_warnings) j["misra_warnings"] = *ind.misra_warnings;
            if (ind.mccabe) j["mccabe"] = *ind.mccabe;
            if (ind.uncovered) j["uncovered"] = *ind.uncovered;
            if (ind.duration_s) j["duration_s"] = *ind.duration_s;
            if (!ind.acting_s.empty()) {
                nlohmann::ordered_json acting = nlohmann::ordered_json::object();
                for (const auto& [situation, value] : ind.acting_s) acting[situation] = value;
                j["acting_s"] = std::move(acting);
            }
            out << j.dump() << '\n';
        }
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed");
}

inline void write_history_file(const HistorySet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing", path);
    write_history_set(set, out);
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'", path);
}

}  // namespace metametrics

#endif  // METAMETRICS_INGEST_HPP
