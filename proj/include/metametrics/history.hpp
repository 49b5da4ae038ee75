// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Domain model for revision histories: one artifact, a dense 1..N sequence of
// test/simulation outcomes plus optional per-revision indicator measurements.
// All types are immutable after construction and safe to share across threads.

#ifndef METAMETRICS_HISTORY_HPP
#define METAMETRICS_HISTORY_HPP

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metametrics/error.hpp"

namespace metametrics {

/// 1-based revision index. Histories are dense: revisions run 1..N.
using Revision = std::uint32_t;

/// Identifier of a development artifact. Non-empty, not whitespace-only.
class ArtifactId {
public:
    explicit ArtifactId(std::string id) : id_(std::move(id)) {
        const bool blank = std::all_of(id_.begin(), id_.end(), [](unsigned char c) {
            return std::isspace(c) != 0;
        });
        if (id_.empty() || blank) {
            throw Error(ErrorCode::InvalidRecord,
                        "artifact id must be non-empty and not whitespace-only");
        }
    }

    const std::string& str() const noexcept { return id_; }

    auto operator<=>(const ArtifactId&) const = default;

private:
    std::string id_;
};

enum class TestOutcome : std::uint8_t { Pass, Fail };

/// res(r, i): 1 for a successful test-run, 0 otherwise.
constexpr int res(TestOutcome outcome) noexcept {
    return outcome == TestOutcome::Pass ? 1 : 0;
}

/// Per-revision measurements. Everything is optional; metrics that need an
/// indicator validate availability themselves and fail loudly rather than
/// imputing values. Durations and acting time points are seconds.
struct IndicatorSample {
    std::optional<std::int64_t> sloc;            // > 0
    std::optional<std::int64_t> misra_warnings;  // >= 0
    std::optional<std::int64_t> mccabe;          // >= 1
    std::optional<std::int64_t> uncovered;       // >= 0
    std::optional<double> duration_s;            // >= 0
    std::map<std::string, double> acting_s;      // situation id -> seconds >= 0

    bool empty() const {
        return !sloc && !misra_warnings && !mccabe && !uncovered && !duration_s &&
               acting_s.empty();
    }

    bool operator==(const IndicatorSample&) const = default;
};

struct RevisionRecord {
    ArtifactId artifact;
    Revision revision = 1;  // >= 1
    TestOutcome outcome = TestOutcome::Fail;
    IndicatorSample indicators;

    bool operator==(const RevisionRecord&) const = default;
};

namespace detail {

// Value-range checks shared by build_history and the ingestion layer.
// Throws InvalidRecord naming the offending field.
inline void check_record_values(const RevisionRecord& rec) {
    const auto fail = [&](const std::string& field, const std::string& why) {
        throw Error(ErrorCode::InvalidRecord,
                    "artifact '" + rec.artifact.str() + "' revision " +
                        std::to_string(rec.revision) + ": " + field + " " + why,
                    field, {rec.revision});
    };
    if (rec.revision < 1) fail("revision", "must be >= 1");
    const IndicatorSample& ind = rec.indicators;
    if (ind.sloc && *ind.sloc <= 0) fail("sloc", "must be > 0 when present");
    if (ind.misra_warnings && *ind.misra_warnings < 0) fail("misra_warnings", "must be >= 0");
    if (ind.mccabe && *ind.mccabe < 1) fail("mccabe", "must be >= 1");
    if (ind.uncovered && *ind.uncovered < 0) fail("uncovered", "must be >= 0");
    if (ind.duration_s && !(*ind.duration_s >= 0.0)) fail("duration_s", "must be >= 0");
    for (const auto& [situation, seconds] : ind.acting_s) {
        if (situation.empty()) fail("acting_s", "situation id must be non-empty");
        if (!(seconds >= 0.0)) fail("acting_s", "time point must be >= 0 ('" + situation + "')");
    }
}

}  // namespace detail

/// Dense, ordered revision history of a single artifact. records()[k] is
/// revision k+1; N == size(). Construct via from_records or build_history.
class ArtifactHistory {
public:
    /// Validates: all records belong to `artifact`, values are in range, and
    /// revisions are exactly 1..N once sorted (duplicates and gaps rejected).
    static ArtifactHistory from_records(ArtifactId artifact,
                                        std::vector<RevisionRecord> records) {
        if (records.empty()) {
            throw Error(ErrorCode::EmptyInput,
                        "artifact '" + artifact.str() + "': no revision records");
        }
        std::sort(records.begin(), records.end(),
                  [](const RevisionRecord& a, const RevisionRecord& b) {
                      return a.revision < b.revision;
                  });
        for (std::size_t k = 0; k < records.size(); ++k) {
            const RevisionRecord& rec = records[k];
            if (rec.artifact != artifact) {
                throw Error(ErrorCode::InvalidRecord,
                            "record for artifact '" + rec.artifact.str() +
                                "' mixed into history of '" + artifact.str() + "'");
            }
            detail::check_record_values(rec);
            const Revision expected = static_cast<Revision>(k + 1);
            if (rec.revision == expected) continue;
            if (k > 0 && rec.revision == records[k - 1].revision) {
                throw Error(ErrorCode::DuplicateRevision,
                            "artifact '" + artifact.str() + "': duplicate revision " +
                                std::to_string(rec.revision),
                            artifact.str(), {rec.revision});
            }
            throw Error(ErrorCode::GapInHistory,
                        "artifact '" + artifact.str() + "': missing revision " +
                            std::to_string(expected),
                        artifact.str(), {expected});
        }
        return ArtifactHistory(std::move(artifact), std::move(records));
    }

    const ArtifactId& artifact() const noexcept { return artifact_; }
    std::span<const RevisionRecord> records() const noexcept { return records_; }

    /// N: total number of revisions.
    Revision size() const noexcept { return static_cast<Revision>(records_.size()); }

    /// Record at 1-based revision i.
    const RevisionRecord& at(Revision i) const {
        if (i < 1 || i > size()) {
            throw Error(ErrorCode::OutOfRange,
                        "revision " + std::to_string(i) + " out of range 1.." +
                            std::to_string(size()));
        }
        return records_[i - 1];
    }

    TestOutcome outcome_at(Revision i) const { return at(i).outcome; }

    /// Sub-history of revisions 1..n.
    ArtifactHistory prefix(Revision n) const {
        if (n < 1 || n > size()) {
            throw Error(ErrorCode::OutOfRange,
                        "prefix length " + std::to_string(n) + " out of range 1.." +
                            std::to_string(size()));
        }
        return ArtifactHistory(
            artifact_, std::vector<RevisionRecord>(records_.begin(), records_.begin() + n));
    }

    bool operator==(const ArtifactHistory&) const = default;

private:
    ArtifactHistory(ArtifactId artifact, std::vector<RevisionRecord> records)
        : artifact_(std::move(artifact)), records_(std::move(records)) {}

    ArtifactId artifact_;
    std::vector<RevisionRecord> records_;
};

inline ArtifactHistory prefix(const ArtifactHistory& h, Revision n) { return h.prefix(n); }

/// Map of artifact id to its history, ordered by id.
class HistorySet {
public:
    using Map = std::map<ArtifactId, ArtifactHistory>;

    HistorySet() = default;

    void insert(ArtifactHistory history) {
        ArtifactId id = history.artifact();
        auto [it, inserted] = histories_.emplace(std::move(id), std::move(history));
        if (!inserted) {
            throw Error(ErrorCode::InvalidRecord,
                        "artifact '" + it->first.str() + "' already present in history set");
        }
    }

    const ArtifactHistory* find(const ArtifactId& id) const {
        auto it = histories_.find(id);
        return it == histories_.end() ? nullptr : &it->second;
    }

    const ArtifactHistory& at(const ArtifactId& id) const {
        const ArtifactHistory* h = find(id);
        if (!h) {
            throw Error(ErrorCode::OutOfRange, "no history for artifact '" + id.str() + "'");
        }
        return *h;
    }

    Map::const_iterator begin() const noexcept { return histories_.begin(); }
    Map::const_iterator end() const noexcept { return histories_.end(); }
    std::size_t size() const noexcept { return histories_.size(); }
    bool empty() const noexcept { return histories_.empty(); }

    std::size_t total_revisions() const noexcept {
        std::size_t n = 0;
        for (const auto& [id, h] : histories_) n += h.size();
        return n;
    }

    bool operator==(const HistorySet&) const = default;

private:
    Map histories_;
};

/// Groups an unordered record collection by artifact and validates each
/// resulting history. Permutation-invariant: any ordering of the same records
/// yields the same HistorySet.
inline HistorySet build_history(std::vector<RevisionRecord> records) {
    if (records.empty()) {
        throw Error(ErrorCode::EmptyInput, "no revision records given");
    }
    std::map<ArtifactId, std::vector<RevisionRecord>> grouped;
    for (RevisionRecord& rec : records) {
        ArtifactId id = rec.artifact;
        grouped[std::move(id)].push_back(std::move(rec));
    }
    HistorySet set;
    for (auto& [id, group] : grouped) {
        set.insert(ArtifactHistory::from_records(id, std::move(group)));
    }
    return set;
}

}  // namespace metametrics

#endif  // METAMETRICS_HISTORY_HPP
