// Copyright 2026 The metametrics Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations used only by the test suite. Each function
// recomputes its figure along a different algorithmic route than the engine
// (forward scans instead of backward, run counting instead of transition
// counting, two-pass moments instead of sum-of-squares) while raising the
// same error codes, subjects and revision lists in the same precedence.

#ifndef METAMETRICS_ORACLE_HPP
#define METAMETRICS_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "metametrics/error.hpp"
#include "metametrics/history.hpp"
#include "metametrics/metrics.hpp"

namespace metametrics::oracle {

namespace detail {

inline void check_prefix(const ArtifactHistory& h, Revision n) {
    if (n < 1 || n > h.size()) {
        throw Error(ErrorCode::OutOfRange, "oracle: gate " + std::to_string(n) + " out of range");
    }
}

inline void check_gate_pair(const ArtifactHistory& h, Revision n1, Revision n2,
                            bool strict_order) {
    check_prefix(h, n1);
    check_prefix(h, n2);
    if (n1 > n2 || (strict_order && n1 == n2)) {
        throw Error(ErrorCode::InvalidGateOrder, "oracle: bad gate order");
    }
}

}  // namespace detail

/// Counts failures and subtracts, instead of summing successes.
inline std::uint64_t r_succeeded(const ArtifactHistory& h, Revision n) {
    detail::check_prefix(h, n);
    std::uint64_t fails = 0;
    for (Revision i = n; i >= 1; --i) {
        if (h.outcome_at(i) == TestOutcome::Fail) ++fails;
    }
    return n - fails;
}

inline std::uint64_t r_failed(const ArtifactHistory& h, Revision n) {
    return n - oracle::r_succeeded(h, n);
}

inline SuccessRatio success_ratio(const ArtifactHistory& h, Revision n) {
    const double minus = static_cast<double>(oracle::r_failed(h, n)) / static_cast<double>(n);
    return SuccessRatio{1.0 - minus, minus};
}

/// Forward scan keeping the latest failure seen.
inline Revision last_failed(const ArtifactHistory& h, Revision n) {
    detail::check_prefix(h, n);
    Revision latest = 0;
    for (Revision i = 1; i <= n; ++i) {
        if (h.outcome_at(i) == TestOutcome::Fail) latest = i;
    }
    return latest;
}

inline Revision neg_age(const ArtifactHistory& h, Revision n) {
    return n - oracle::last_failed(h, n);
}

/// Counts maximal failure runs that end strictly before n, instead of
/// counting fail->pass transitions.
inline std::uint64_t r_failures(const ArtifactHistory& h, Revision n) {
    detail::check_prefix(h, n);
    std::uint64_t runs = 0;
    Revision i = 1;
    while (i <= n) {
        if (h.outcome_at(i) == TestOutcome::Pass) {
            ++i;
            continue;
        }
        Revision end = i;
        while (end + 1 <= n && h.outcome_at(end + 1) == TestOutcome::Fail) ++end;
        if (end < n) ++runs;  // a run reaching n has no resolving pass
        i = end + 1;
    }
    return runs;
}

inline double q3_mtbtf(const ArtifactHistory& h, Revision n) {
    const std::uint64_t failures = oracle::r_failures(h, n);
    if (failures == 0) {
        throw Error(ErrorCode::UndefinedMtbtf, "oracle: no resolved failure episode");
    }
    return static_cast<double>(oracle::r_succeeded(h, n)) / static_cast<double>(failures);
}

inline double q1(const ArtifactHistory& h, Revision n1, Revision n2) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    return oracle::success_ratio(h, n2).r_plus - oracle::success_ratio(h, n1).r_plus;
}

inline double q2(const ArtifactHistory& h, Revision n1, Revision n2) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/true);
    return static_cast<double>(oracle::neg_age(h, n2)) - static_cast<double>(oracle::neg_age(h, n1));
}

namespace detail {

inline double mean_relative_indicator(const ArtifactHistory& h, Revision n, IndicatorKind kind) {
    std::vector<double> ratios;
    ratios.reserve(n);
    for (Revision i = 1; i <= n; ++i) {
        const IndicatorSample& ind = h.at(i).indicators;
        ratios.push_back(static_cast<double>(*indicator_value(ind, kind)) /
                         static_cast<double>(*ind.sloc));
    }
    // Reverse-order accumulation: equal within round-off, not bit-identical.
    double sum = 0.0;
    for (auto it = ratios.rbegin(); it != ratios.rend(); ++it) sum += *it;
    return sum / static_cast<double>(n);
}

}  // namespace detail

inline double q4(const ArtifactHistory& h, Revision n1, Revision n2, IndicatorKind kind) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    std::vector<Revision> missing;
    for (Revision i = 1; i <= n2; ++i) {
        if (!indicator_value(h.at(i).indicators, kind)) missing.push_back(i);
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingIndicator, "oracle: indicator missing",
                    indicator_name(kind), std::move(missing));
    }
    for (Revision i = 1; i <= n2; ++i) {
        if (!h.at(i).indicators.sloc) missing.push_back(i);
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingIndicator, "oracle: sloc missing", "sloc",
                    std::move(missing));
    }
    return detail::mean_relative_indicator(h, n1, kind) -
           detail::mean_relative_indicator(h, n2, kind);
}

namespace detail {

inline double mean_pass_duration(const ArtifactHistory& h, Revision n) {
    std::vector<double> durations;
    for (Revision i = 1; i <= n; ++i) {
        const RevisionRecord& rec = h.at(i);
        if (rec.outcome == TestOutcome::Pass) durations.push_back(*rec.indicators.duration_s);
    }
    return std::accumulate(durations.begin(), durations.end(), 0.0) /
           static_cast<double>(durations.size());
}

}  // namespace detail

inline double q5(const ArtifactHistory& h, Revision n1, Revision n2) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    if (oracle::r_succeeded(h, n1) == 0) {
        throw Error(ErrorCode::NoSuccessfulRevisions, "oracle: no pass in early prefix");
    }
    std::vector<Revision> missing;
    for (Revision i = 1; i <= n2; ++i) {
        const RevisionRecord& rec = h.at(i);
        if (rec.outcome == TestOutcome::Pass && !rec.indicators.duration_s) missing.push_back(i);
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingIndicator, "oracle: duration missing", "duration_s",
                    std::move(missing));
    }
    return detail::mean_pass_duration(h, n1) - detail::mean_pass_duration(h, n2);
}

/// Two-pass moments: mean first, then squared deviations.
inline ActingStats acting_stddev(const ArtifactHistory& h, Revision n,
                                 std::string_view situation,
                                 VarianceMode mode = VarianceMode::PassesOnly) {
    detail::check_prefix(h, n);
    const std::uint64_t passes = oracle::r_succeeded(h, n);
    if (passes == 0) {
        throw Error(ErrorCode::NoSuccessfulRevisions, "oracle: no pass in prefix");
    }
    const std::string key(situation);
    std::vector<Revision> missing;
    std::vector<double> values;
    for (Revision i = 1; i <= n; ++i) {
        const RevisionRecord& rec = h.at(i);
        if (rec.outcome != TestOutcome::Pass) continue;
        const auto it = rec.indicators.acting_s.find(key);
        if (it == rec.indicators.acting_s.end()) {
            missing.push_back(i);
        } else {
            values.push_back(it->second);
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::MissingSituation, "oracle: situation missing", key,
                    std::move(missing));
    }
    const double np = static_cast<double>(passes);
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / np;
    double dev_sum = 0.0;
    for (double x : values) dev_sum += (x - mean) * (x - mean);
    if (mode == VarianceMode::StrictAllZero) {
        dev_sum += static_cast<double>(n - passes) * mean * mean;
    }
    return ActingStats{mean, std::sqrt(dev_sum / np)};
}

inline double q6(const ArtifactHistory& h, Revision n1, Revision n2,
                 std::string_view situation, VarianceMode mode = VarianceMode::PassesOnly) {
    detail::check_gate_pair(h, n1, n2, /*strict_order=*/false);
    const ActingStats earlier = oracle::acting_stddev(h, n1, situation, mode);
    const ActingStats later = oracle::acting_stddev(h, n2, situation, mode);
    return earlier.stddev_s - later.stddev_s;
}

}  // namespace metametrics::oracle

#endif  // METAMETRICS_ORACLE_HPP
